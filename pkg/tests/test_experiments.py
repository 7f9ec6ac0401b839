import math

import numpy as np
import pytest
from scipy import integrate

from ltlab import DomainError, ResolutionError
from ltlab.constants import classical_L_value, one_particle_L_1d, sphere_area
from ltlab.spectral import PotentialSpec
from ltlab.spectral.experiments import (box_modes, find_increase_window, harmonic_limit, harmonic_riesz_sum,
                                        largest_stable, lt_ratio_report, monotonicity_experiment,
                                        reverse_bound_check, slater_identity_check, two_bump_experiment,
                                        weyl_convergence)


def test_poschl_teller_ratio():
    V = PotentialSpec("poschl_teller", {"nu": 2})
    (row,) = lt_ratio_report(V, [1.0], extent=20.0, step=0.01)
    # eigenvalues {-4, -1}, integral 3 sqrt(6) pi
    assert row["ratio"] == pytest.approx(5 / (3 * math.sqrt(6) * math.pi), rel=1e-6)
    assert row["ratio"] < 1.456 * classical_L_value(1, 1)
    assert row["ratio"] < one_particle_L_1d(1).value
    assert row["below_best"] and row["below_conjectured"]


@pytest.mark.parametrize("V", [
    PotentialSpec("poschl_teller", {"nu": 2}),
    PotentialSpec("poschl_teller", {"nu": 0.5}),
    PotentialSpec("square_well", {"depth": 3.0, "width": 1.0}),
    PotentialSpec("gaussian", {"depth": 0.2}),
    PotentialSpec("gaussian", {"depth": 30.0}),
])
def test_half_gamma_ratio_below_half(V):
    (row,) = lt_ratio_report(V, [0.5], extent=20.0, step=0.01)
    assert row["ratio"] <= 0.5 + 5e-3
    assert row["below_half"]


def test_ratio_scaling_invariance():
    base = PotentialSpec("gaussian", {"depth": 6.0})
    scaled = PotentialSpec("gaussian", {"depth": 6.0, "alpha": 4.0, "scale": 2.0})
    r1 = lt_ratio_report(base, [1.0, 1.5], extent=20.0, step=0.01, conjecture=False)
    r2 = lt_ratio_report(scaled, [1.0, 1.5], extent=10.0, step=0.005, conjecture=False)
    for a, b in zip(r1, r2):
        assert b["ratio"] == pytest.approx(a["ratio"], rel=1e-8)


def test_inadmissible_gamma_rejected():
    with pytest.raises(DomainError):
        lt_ratio_report(PotentialSpec("gaussian"), [0.25])


def test_weak_coupling_exceeds_classical():
    V = PotentialSpec("gaussian", {"depth": 1.0})
    (row,) = weyl_convergence(V, 0.5, [0.05], extent=60.0, step=0.02)
    assert row["n_states"] == 1
    assert row["ratio"] > 1.0


def test_weyl_trend():
    V = PotentialSpec("gaussian", {"depth": 1.0})
    rows = weyl_convergence(V, 1.0, [10.0, 100.0, 1000.0])
    devs = [r["deviation"] for r in rows]
    assert devs[0] > devs[1] > devs[2]
    assert all(r["resolution"] <= 0.1 for r in rows)


def test_weyl_coupling_equivalence():
    # (V, alpha) and (2V, alpha/2) describe the same operator
    V = PotentialSpec("gaussian", {"depth": 1.0})
    W = PotentialSpec("gaussian", {"depth": 2.0})
    a = weyl_convergence(V, 1.0, [40.0], extent=12.0, step=0.01)[0]
    b = weyl_convergence(W, 1.0, [20.0], extent=12.0, step=0.01)[0]
    assert a["ratio"] == pytest.approx(b["ratio"], rel=1e-10)
    assert a["n_states"] == b["n_states"]


def test_weyl_coarse_grid_rejected():
    with pytest.raises(ResolutionError):
        weyl_convergence(PotentialSpec("gaussian"), 1.0, [1e4], extent=10.0, step=0.05)


def test_monotone_for_gamma_two():
    rows = monotonicity_experiment(1, 2.0, np.linspace(1e-3, 1.0, 1000))
    assert not any(r["increase"] for r in rows)


def test_increase_near_one_ninth():
    rows = monotonicity_experiment(1, 1.0, np.linspace(0.09, 0.14, 2001))
    assert any(r["increase"] for r in rows)
    lo, hi = find_increase_window(1, 1.0, 0.09, 0.14)
    assert lo < 1 / 8 and hi > 1 / 9


@pytest.mark.parametrize("d, gamma", [(1, 1.0), (1, 2.0), (2, 1.0), (3, 0.5)])
def test_semiclassical_limit_value(d, gamma):
    kappa = gamma + d / 2
    radial = integrate.quad(lambda r: (1 - r * r) ** kappa * r ** (d - 1), 0, 1, epsabs=0, epsrel=1e-13)[0]
    oracle = classical_L_value(gamma, d) * sphere_area(d) * radial
    assert harmonic_limit(d, gamma) == pytest.approx(oracle, rel=1e-12)
    assert harmonic_riesz_sum(1e-4, d, gamma) == pytest.approx(oracle, rel=5e-3)


def test_harmonic_sum_direct_count():
    # d = 2: enumerate (n1, n2) directly
    hb, g = 0.07, 1.0
    direct = sum((1 - hb * (2 * (a + b) + 2)) ** g for a in range(30) for b in range(30)
                 if 1 - hb * (2 * (a + b) + 2) > 0)
    assert harmonic_riesz_sum(hb, 2, g) == pytest.approx(hb**2 * direct, rel=1e-13)


def test_reverse_bound_square_well():
    res = reverse_bound_check(PotentialSpec("square_well", {"depth": 1.0, "width": 1.0}))
    assert res.passed and res.margin > 0


def test_reverse_bound_equality_case():
    res = reverse_bound_check(PotentialSpec("poschl_teller", {"nu": 2}))
    assert res.lhs == pytest.approx(3.0, abs=1e-6)
    assert res.rhs == pytest.approx(3.0, rel=1e-10)
    assert res.passed


def test_reverse_bound_zero_potential():
    res = reverse_bound_check(PotentialSpec("gaussian", {"alpha": 0.0}))
    assert res.lhs == 0.0 and res.rhs == 0.0 and res.passed


def test_reverse_bound_rejects_positive_parts():
    with pytest.raises(DomainError):
        reverse_bound_check(PotentialSpec("shifted_harmonic"))


def test_slater_two_modes():
    u, _ = box_modes(1.0, 0.02, 2)
    out = slater_identity_check(u, 0.02)
    assert out["passed"]
    assert out["kinetic_rel_error"] < 1e-8 and out["density_max_error"] < 1e-8


def test_slater_three_random_orbitals():
    rng = np.random.default_rng(7)
    n, h = 60, 0.05
    q, _ = np.linalg.qr(rng.normal(size=(n, 3)))
    out = slater_identity_check(q.T / math.sqrt(h), h)
    assert out["passed"]


def test_slater_single_orbital():
    u, _ = box_modes(1.0, 0.01, 1)
    out = slater_identity_check(u, 0.01)
    assert out["kinetic_rel_error"] == 0.0 and out["density_max_error"] == 0.0


def test_slater_rejects_repeated_orbital():
    u, _ = box_modes(1.0, 0.02, 1)
    with pytest.raises(DomainError):
        slater_identity_check(np.vstack([u, u]), 0.02)


@pytest.fixture(scope="module")
def two_bump_rows():
    return two_bump_experiment(gamma=2.0, R_values=(6, 8, 10, 12))


def test_two_bump_exceeds_one_particle(two_bump_rows):
    L1 = one_particle_L_1d(2.0).value
    for row in two_bump_rows:
        assert row["ratio"] > L1
        assert row["exceeds_L1"]


def test_two_bump_decreases_to_L1(two_bump_rows):
    L1 = one_particle_L_1d(2.0).value
    excess = [row["ratio"] - L1 for row in two_bump_rows]
    assert all(a > b for a, b in zip(excess, excess[1:]))
    # the correction is proportional to the overlap A, which decays exponentially
    assert excess[-1] < 1e-3 * L1


def test_two_bump_residual_smaller_than_A(two_bump_rows):
    stable = [r for r in two_bump_rows if r["stable"]]
    assert stable
    rel = [abs(r["residual"]) / r["A"] for r in stable]
    assert rel[-1] < rel[0]
    assert largest_stable(two_bump_rows)["R"] == stable[-1]["R"]
