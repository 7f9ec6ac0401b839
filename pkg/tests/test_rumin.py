import math

import numpy as np
import pytest
from scipy import special

from ltlab import DomainError
from ltlab.constants import classical_K, classical_L_value
from ltlab.rumin import (PUBLISHED_I1_BOUND, TrialPair, chain_report, convolve_g, k_tilde, k_tilde_explicit,
                         k_tilde_factor, lifting_chain, one_minus_g, optimize_trial, rumin_functional,
                         semiclassical_trial_bound)


@pytest.fixture(scope="module")
def published():
    return TrialPair.published()


def test_normalizations(published):
    assert published.f_norm == pytest.approx(1.0, rel=1e-10)
    assert published.w_l1 == pytest.approx(1.0, rel=1e-10)
    assert float(published.f(0.0)) == 1.0


def test_g_limits(published):
    assert convolve_g(published, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert one_minus_g(published, 1e-6) < 1e-12
    assert convolve_g(published, 1e8) < 1e-3
    # 0 <= g <= 1 because 0 < f <= 1 and w is a probability density
    for t in np.geomspace(1e-3, 1e4, 15):
        assert 0.0 <= convolve_g(published, t) <= 1.0


def test_sifting_limit():
    s0, width = 0.4, 1e-3
    ws = np.linspace(s0 - width, s0 + width, 41)
    wv = np.maximum(0.0, 1 - np.abs(ws - s0) / width) / width
    fs = np.linspace(0, 30, 30001)
    fv = np.exp(-fs)
    tp = TrialPair("tabulated", f_table=(fs, fv), w_table=(ws, wv))
    assert tp.w_l1 == pytest.approx(1.0, rel=1e-10)
    for t in (0.5, 1.0, 3.0):
        expected = float(tp.f(s0 * t)) * tp.w_l1
        assert convolve_g(tp, t) == pytest.approx(expected, rel=0.01)


def test_published_value(published):
    value, err = rumin_functional(published, 1, return_error=True)
    assert value <= PUBLISHED_I1_BOUND
    assert value == pytest.approx(0.7471, abs=2e-4)
    assert err < 1e-6
    assert value >= 2 / 3


@pytest.mark.parametrize("params", [(2.0, 1.0, 1.0, 1.0), (4.0, 0.5, 0.5, 3.0), (6.0, 0.2, 0.3, 1.5)])
def test_lower_bound_two_thirds(params):
    assert rumin_functional(TrialPair("power", params), 1) >= 2 / 3


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_invariance(published, lam):
    # w -> w(s/lam)/lam keeps int w = 1, scales int w^2 by 1/lam and maps g(t) to g(lam t)
    fs = np.concatenate([[0.0], np.geomspace(1e-6, 1e5, 4000)])
    fv = published.f(fs)
    ws = np.linspace(0, 1, 41)
    wv = published.w(ws)
    base = TrialPair("tabulated", f_table=(fs, fv), w_table=(ws, wv))
    scaled = TrialPair("tabulated", f_table=(fs, fv), w_table=(ws * lam, wv / lam))
    assert rumin_functional(scaled, 1, rtol=1e-8) == pytest.approx(rumin_functional(base, 1, rtol=1e-8), rel=1e-6)


def test_divergent_pair_rejected():
    with pytest.raises(DomainError):
        rumin_functional(TrialPair("power", (0.2, 3.0, 1.0, 1.0)), 1)
    with pytest.raises(DomainError):
        TrialPair("power", (1.0, 0.4, 1.0, 1.0))
    with pytest.raises(DomainError):
        TrialPair("power", (1.0, -1.0, 1.0, 1.0))


def test_json_round_trip(published):
    back = TrialPair.from_json(published.to_json())
    assert back.params == published.params
    assert back.mu == pytest.approx(published.mu, rel=1e-14)


def test_k_tilde_published():
    r = k_tilde(1, PUBLISHED_I1_BOUND)
    assert r.excess_K == pytest.approx(0.4718, abs=1e-4)
    assert f"{r.excess_K:.3g}" == f"{1.456**-2:.3g}"
    assert r.k_tilde == pytest.approx(r.excess_K * classical_K(1).value, rel=1e-14)


def test_k_tilde_method_limit():
    # at the lower limit 2/3 of I_1 the factor is 2^6 / 3^5 (3/2)^2
    assert k_tilde_factor(1, 2 / 3) == pytest.approx(64 / 243 * 2.25, rel=1e-14)
    assert k_tilde(1, 2 / 3).excess_K == pytest.approx(0.59, abs=5e-3)


@pytest.mark.parametrize("d", range(1, 11))
def test_k_tilde_two_forms(d):
    for i_d in (0.3, 0.7471, 2.0):
        assert k_tilde_explicit(d, i_d) == pytest.approx(k_tilde_factor(d, i_d) * classical_K(d).value, rel=1e-12)


@pytest.mark.parametrize("d", range(2, 11))
def test_lifting_identity(d):
    def lcl(g, n):
        return (4 * math.pi) ** (-n / 2) * special.gamma(g + 1) / special.gamma(g + 1 + n / 2)

    assert lcl(1, 1) * lcl(1.5, d - 1) == pytest.approx(lcl(1, d), rel=1e-12)
    assert lifting_chain(d, PUBLISHED_I1_BOUND).value == pytest.approx(
        lifting_chain(1, PUBLISHED_I1_BOUND).meta["factor"] * classical_L_value(1, d), rel=1e-12)


def test_lifting_chain_3d():
    lb = lifting_chain(3, PUBLISHED_I1_BOUND)
    assert f"{lb.value / classical_L_value(1, 3):.3g}" == "1.46"
    assert f"{lb.meta['K_factor_d'] ** 3:.3g}" == f"{0.471851:.3g}"


def test_chain_report_rows():
    rep = chain_report()
    assert [r["d"] for r in rep["rows"]] == [1, 2, 3, 4, 5]
    for r in rep["rows"]:
        assert r["K_factor_pow_d"] == pytest.approx(rep["K_tilde_1_over_Kcl"], rel=1e-12)


def test_optimize_small_budget(published):
    seed_value = rumin_functional(published, 1, rtol=1e-6)
    tp, value = optimize_trial(published, 1, budget=6, rtol=1e-6)
    assert value <= seed_value
    assert value >= 2 / 3
    assert value <= PUBLISHED_I1_BOUND


def test_optimize_rejects_degenerate_seed():
    with pytest.raises(DomainError):
        optimize_trial(TrialPair("power", (0.2, 3.0, 1.0, 1.0)), 1, budget=4)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_semiclassical_limit(d):
    val = semiclassical_trial_bound(1e-3, 1e8, d)
    assert val == pytest.approx(classical_K(d).value, rel=0.01)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_semiclassical_above_classical(d):
    kcl = classical_K(d).value
    for ramp in (0.01, 0.1, 0.5):
        for muL2 in (1.0, 1e2, 1e5):
            assert semiclassical_trial_bound(ramp, muL2, d) >= kcl
