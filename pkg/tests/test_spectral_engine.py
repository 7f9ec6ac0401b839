import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg, optimize

from ltlab import DomainError, ResolutionError
from ltlab.spectral import (PotentialSpec, SchrodingerSpectrum, TruncationWarning, channel_multiplicity,
                            check_resolution, discretize_1d, discretize_radial, radial_channels, richardson,
                            spectrum)


def zero(x):
    return np.zeros_like(x)


def test_free_box_lowest_level():
    X, h = 5.0, 0.01
    op = discretize_1d(zero, X, h)
    lam = op.smallest(1)[0]
    # the discrete Dirichlet Laplacian has the exact eigenvalue (4/h^2) sin^2(pi h / (4X))
    assert lam == pytest.approx(4 / h**2 * math.sin(math.pi * h / (4 * X)) ** 2, rel=1e-10)
    cont = (math.pi / (2 * X)) ** 2
    assert abs(lam - cont) <= cont * (math.pi * h / (2 * X)) ** 2
    assert lam > 0


def test_zero_potential_has_no_negative_spectrum():
    est = SchrodingerSpectrum(extent=5.0, step=0.05).fit(zero)
    assert est.eigenvalues_.size == 0
    assert est.summary_.riesz_mean(1.0) == 0.0


def test_nonfinite_samples_rejected():
    with pytest.raises(DomainError):
        discretize_1d(lambda x: np.where(x > 0, np.nan, 0.0), 2.0, 0.1)


def test_grid_must_divide_extent():
    with pytest.raises(DomainError):
        discretize_1d(zero, 1.0, 0.3)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sturm_count_matches_dense(seed):
    rng = np.random.default_rng(seed)
    V = PotentialSpec("gaussian", {"depth": float(rng.uniform(1, 20)), "width": float(rng.uniform(0.3, 2))})
    op = discretize_1d(V, 4.0, 0.05)
    dense = linalg.eigh_tridiagonal(op.diag, op.off, eigvals_only=True)
    lo, hi = op.gershgorin()
    for x in rng.uniform(lo, min(hi, 50.0), 10):
        assert op.count_below(x) == int(np.sum(dense < x))


def test_bisection_matches_dense():
    V = PotentialSpec("poschl_teller", {"nu": 3})
    op = discretize_1d(V, 8.0, 0.02)
    dense = linalg.eigh_tridiagonal(op.diag, op.off, eigvals_only=True)
    np.testing.assert_allclose(op.eigenvalues_below(0.0), dense[dense < 0], atol=1e-11)


def _square_well_oracle(depth, a):
    # even ground state: k tan(k a) = kappa with k^2 + kappa^2 = depth
    def f(k):
        return k * math.tan(k * a) - math.sqrt(depth - k * k)

    k = optimize.brentq(f, 1e-12, min(math.sqrt(depth), math.pi / (2 * a)) - 1e-12, xtol=1e-15)
    return k * k - depth


def test_square_well_ground_state():
    V = PotentialSpec("square_well", {"depth": 1.0, "width": 1.0})
    est = SchrodingerSpectrum(extent=20.0, step=0.005, levels=3).fit(V)
    assert est.eigenvalues_[0] == pytest.approx(_square_well_oracle(1.0, 1.0), abs=1e-6)


def test_poschl_teller_levels():
    V = PotentialSpec("poschl_teller", {"nu": 2})
    est = SchrodingerSpectrum(extent=20.0, step=0.001, levels=1).fit(V)
    np.testing.assert_allclose(est.eigenvalues_, [-4.0, -1.0], atol=1e-5)
    # dense diagonalization on a coarser grid agrees with the bisection result there
    op = discretize_1d(V, 20.0, 0.01)
    dense = linalg.eigh_tridiagonal(op.diag, op.off, eigvals_only=True)
    np.testing.assert_allclose(op.eigenvalues_below(0.0), dense[dense < 0], atol=1e-11)


@pytest.mark.parametrize("hbar", [0.15, 0.3])
def test_shifted_harmonic_with_hbar(hbar):
    V = PotentialSpec("shifted_harmonic")
    est = SchrodingerSpectrum(extent=8.0, step=0.01, levels=3, hbar=hbar).fit(V)
    exact = [hbar * (2 * n + 1) - 1 for n in range(10) if hbar * (2 * n + 1) < 1]
    np.testing.assert_allclose(est.eigenvalues_, exact, atol=1e-8)


def test_translation_invariance():
    V = PotentialSpec("gaussian", {"depth": 5.0})
    shift = 0.5
    a = SchrodingerSpectrum(extent=20.0, step=0.01).fit(V).eigenvalues_
    b = SchrodingerSpectrum(extent=20.0, step=0.01).fit(lambda x: V(x - shift)).eigenvalues_
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_domain_doubling():
    V = PotentialSpec("poschl_teller", {"nu": 2})
    a = SchrodingerSpectrum(extent=20.0, step=0.01).fit(V).eigenvalues_
    b = SchrodingerSpectrum(extent=40.0, step=0.01).fit(V).eigenvalues_
    assert np.max(np.abs(a - b)) < 1e-8


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_covariance(lam):
    # lam^2 V(lam x) has spectrum lam^2 E
    base = PotentialSpec("gaussian", {"depth": 4.0})
    scaled = PotentialSpec("gaussian", {"depth": 4.0, "alpha": lam**2, "scale": lam})
    e1 = SchrodingerSpectrum(extent=20.0, step=0.01, levels=3).fit(base).eigenvalues_
    e2 = SchrodingerSpectrum(extent=20.0 / lam, step=0.01 / lam, levels=3).fit(scaled).eigenvalues_
    np.testing.assert_allclose(e2, lam**2 * e1, rtol=1e-9)


def test_richardson_exact_on_even_polynomials():
    h = np.array([0.1, 0.05, 0.025])
    levels = [np.array([1.0 + 3 * hh**2 - 7 * hh**4]) for hh in h]
    best, err = richardson(levels)
    assert best[0] == pytest.approx(1.0, abs=1e-13)
    assert err.shape == best.shape


def test_estimator_params_and_summary():
    est = SchrodingerSpectrum(extent=10.0, step=0.02, levels=2)
    assert est.get_params()["step"] == 0.02
    V = PotentialSpec("poschl_teller", {"nu": 1})
    est.fit(V)
    summ = est.summary_
    assert summ.count_below(0.0) == 1
    doc = json.loads(summ.to_json())
    assert doc["eigenvalues"][0]["multiplicity"] == 1
    rows = summ.to_csv().splitlines()
    assert rows[0] == "index,energy,multiplicity"
    assert float(rows[1].split(",")[1]) == pytest.approx(-1.0, abs=1e-5)


def test_channel_multiplicities():
    assert [channel_multiplicity(2, ell) for ell in range(4)] == [1, 2, 2, 2]
    assert [channel_multiplicity(3, ell) for ell in range(5)] == [2 * ell + 1 for ell in range(5)]
    assert channel_multiplicity(4, 2) == 9


def test_radial_3d_hydrogen_like_well():
    # 3D square well of radius 1 and depth D: the l=0 channel reduces to the odd 1D problem
    D = 10.0
    V = PotentialSpec("square_well", {"depth": D, "width": 1.0}, dim=3, radial=True)
    summ = radial_channels(V, extent=15.0, step=0.005, levels=3)

    def odd(k):
        return k / math.tan(k) + math.sqrt(D - k * k)

    k = optimize.brentq(odd, math.pi / 2 + 1e-9, min(math.pi, math.sqrt(D)) - 1e-9, xtol=1e-15)
    assert summ.eigenvalues[0] == pytest.approx(k * k - D, abs=1e-4)
    assert summ.grid_meta["truncated"] is False


def test_radial_2d_multiplicity_weights():
    V = PotentialSpec("gaussian", {"depth": 20.0}, dim=2, radial=True)
    summ = radial_channels(V, extent=12.0, step=0.02)
    chans = summ.grid_meta["channels"]
    assert [c["multiplicity"] for c in chans] == [channel_multiplicity(2, c["ell"]) for c in chans]
    assert summ.count_below(0.0) == sum(c["multiplicity"] * c["count"] for c in chans)


def test_truncation_warning():
    V = PotentialSpec("gaussian", {"depth": 40.0}, dim=3, radial=True)
    with pytest.warns(TruncationWarning):
        radial_channels(V, ell_max=0, extent=10.0, step=0.05)


def test_ggm_counts_in_a_box():
    # strictly negative FD states for V^(L), d = 3: multiplicity sum over l < L
    for L, expected in [(1, 1), (2, 5)]:
        V = PotentialSpec("ggm_sphere_image", {"L": L}, dim=3, radial=True)
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            summ = radial_channels(V, extent=40.0, step=0.02, levels=2)
        assert summ.count_below(0.0) == expected


def test_ggm_resonance_approaches_zero():
    V = PotentialSpec("ggm_sphere_image", {"L": 0}, dim=3, radial=True)
    lows = []
    for X in (10.0, 20.0, 40.0):
        op = discretize_radial(V, 3, 0, X, 0.02)
        lows.append(op.smallest(1)[0])
    assert all(x > 0 for x in lows)
    assert lows[0] > lows[1] > lows[2]
    assert lows[2] < 1e-2


def test_resolution_guard():
    V = PotentialSpec("gaussian", {"depth": 1.0})
    assert check_resolution(V, 0.01, 10.0, alpha=10.0) < 0.1
    with pytest.raises(ResolutionError):
        check_resolution(V, 0.1, 10.0, alpha=1e4)


def test_spectrum_dispatch():
    s1 = spectrum(PotentialSpec("poschl_teller", {"nu": 2}), extent=10.0, step=0.01, levels=2)
    assert s1.count_below(0.0) == 2
    s3 = spectrum(PotentialSpec("gaussian", {"depth": 2.0}, dim=3, radial=True), extent=10.0, step=0.02)
    assert s3.count_below(0.0) == 0
