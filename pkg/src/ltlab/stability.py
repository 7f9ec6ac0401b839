"""Stability-of-matter lower bound and the optimizations in its proof."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._validation import AccuracyError, DomainError, check_dim, check_positive
from .constants import BEST_K_FACTOR, ConstantValue, Direction, Kind, classical_K

BAXTER_INTEGRAL = 5 * math.pi**2 / 4


def best_k3(conjectured=False):
    """Lower bound on the optimal K_3; the Lieb-Thirring-conjectured K^cl_3 on request."""
    kcl = classical_K(3).value
    if conjectured:
        return ConstantValue(kcl, Kind.CONJECTURED, Direction.EXACT, "Lieb-Thirring conjecture K_3 = K^cl_3")
    return ConstantValue(BEST_K_FACTOR ** (1 / 3) * kcl, Kind.IMPROVED_BOUND, Direction.LOWER_BOUND,
                         "K_3 >= 0.471851^{1/3} K^cl_3")


@dataclass(frozen=True)
class MatterSystem:
    n_electrons: int
    n_nuclei: int
    max_charge: float
    k3: ConstantValue = None

    def __post_init__(self):
        check_dim(self.n_electrons, "n_electrons")
        check_dim(self.n_nuclei, "n_nuclei")
        check_positive(self.max_charge, "max_charge", strict=False)
        if self.k3 is None:
            object.__setattr__(self, "k3", best_k3())
        if self.k3.direction is Direction.UPPER_BOUND:
            raise DomainError("k3 must be a lower bound or an exact value")


def stability_bound(system):
    """Lower bound -(3 pi^{4/3} / (2^{2/3} 5)) K_3^{-1} (2z+1)^2 (N+K) on the ground-state energy."""
    pref = 3 * math.pi ** (4 / 3) / (2 ** (2 / 3) * 5)
    n_total = system.n_electrons + system.n_nuclei
    return -pref / system.k3.value * (2 * system.max_charge + 1) ** 2 * n_total


def baxter_integral_check(rtol=1e-9):
    """4 pi int_0^1 (1/r - 1)^{5/2} r^2 dr, checked against 5 pi^2 / 4.

    With r = t^2 the integrand becomes 2 (1 - t^2)^{5/2}, which is smooth.
    """
    val, err = integrate.quad(lambda t: 2.0 * (1.0 - t * t) ** 2.5, 0.0, 1.0, epsabs=0, epsrel=1e-13)
    val *= 4 * math.pi
    if abs(val - BAXTER_INTEGRAL) > rtol * BAXTER_INTEGRAL:
        raise AccuracyError(f"Baxter integral {val} differs from 5 pi^2/4 = {BAXTER_INTEGRAL}")
    return val


def two_center_bump_integral(separation):
    """int_{R^3} max_k (1/|x - R_k| - 1)_+^{5/2} dx for two centres at the given distance.

    Each centre owns the half-space closer to it. In spherical coordinates
    around one centre the plane sits at distance s/2, so the solid-angle
    fraction of the sphere of radius r on the near side is
    (1 + min(1, s/(2r))) / 2.
    """
    s = check_positive(separation, "separation", strict=False)

    def integrand(t):
        r = t * t
        frac = 1.0 if r == 0 else 0.5 * (1.0 + min(1.0, s / (2 * r)))
        return 2.0 * (1.0 - t * t) ** 2.5 * frac

    brk = [math.sqrt(s / 2)] if 0 < s / 2 < 1 else None
    val, _ = integrate.quad(integrand, 0.0, 1.0, points=brk, epsabs=0, epsrel=1e-12)
    return 2 * 4 * math.pi * val


def energy_after_T(mu, z, n_nuclei, n_electrons, k3):
    """Bound after optimizing over T, as a function of the chemical shift mu."""
    c1 = 2 * 3**1.5 / 5**2.5
    integral = (2 * z + 1) ** 3 * mu**-0.5 * BAXTER_INTEGRAL * n_nuclei
    return -c1 * k3 ** -1.5 * integral - mu * n_electrons


def proof_chain_optimizers(z, n_nuclei, n_electrons, k3=None, T_range=(1e-8, 1e8), mu_range=(1e-8, 1e8),
                           grid_points=400001):
    """Closed-form optimizers in the proof versus brute-force grid minimization.

    The T-step minimizes K3 T - b T^{3/5} - mu N (b = I^{2/5}) at mu = 1; the
    mu-step maximizes the resulting bound over mu. Both are checked on log grids.
    """
    k3 = best_k3().value if k3 is None else float(k3)
    N, K = n_electrons, n_nuclei
    mu0 = 1.0
    integral = (2 * z + 1) ** 3 * mu0**-0.5 * BAXTER_INTEGRAL * K
    b = integral ** 0.4

    def phi(T):
        return k3 * T - b * T**0.6 - mu0 * N

    t_star = (3 * b / (5 * k3)) ** 2.5
    t_grid = np.geomspace(*T_range, grid_points)
    t_grid_arg = t_grid[np.argmin(phi(t_grid))]
    min_closed = -(2 * 3**1.5 / 5**2.5) * k3**-1.5 * integral - mu0 * N

    c1 = 2 * 3**1.5 / 5**2.5
    A = c1 * k3**-1.5 * (2 * z + 1) ** 3 * BAXTER_INTEGRAL * K
    mu_star = (A / (2 * N)) ** (2 / 3)
    mu_grid = np.geomspace(*mu_range, grid_points)
    vals = energy_after_T(mu_grid, z, K, N, k3)
    mu_grid_arg = mu_grid[np.argmax(vals)]
    e_mu = energy_after_T(mu_star, z, K, N, k3)
    e_closed = -(9 * math.pi ** (4 / 3) / (2 ** (4 / 3) * 5)) / k3 * (2 * z + 1) ** 2 * K ** (2 / 3) * N ** (1 / 3)
    e_final = -(3 * math.pi ** (4 / 3) / (2 ** (2 / 3) * 5)) / k3 * (2 * z + 1) ** 2 * (N + K)
    return {
        "T_star": t_star,
        "T_grid_argmin": float(t_grid_arg),
        "phi_min_closed": min_closed,
        "phi_min_grid": float(np.min(phi(t_grid))),
        "mu_star": mu_star,
        "mu_grid_argmax": float(mu_grid_arg),
        "energy_at_mu_star": e_mu,
        "energy_closed_form": e_closed,
        "energy_final": e_final,
        "amgm_lhs": K ** (2 / 3) * N ** (1 / 3),
        "amgm_rhs": 2 ** (2 / 3) / 3 * (K + N),
    }
