"""Exact eigenvalue counts on the sphere behind the Glaser-Grosse-Martin potentials.

Constant potentials W on S^d pull back, under inverse stereographic
projection, to the radial potentials

    V^(L)(x) = -(L + (d-2)/2)(L + d/2) (2 / (1 + |x|^2))^2

on R^d. Counts are computed in exact integer/rational arithmetic; only the
ratios a_L go through floating point.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from ._validation import DomainError, check_dim
from .constants import ConstantValue, Direction, Kind, classical_L_value, sphere_area


def sphere_surface(d):
    """Area of the d-sphere S^d (embedded in R^{d+1})."""
    return sphere_area(check_dim(d, "d") + 1)


def multiplicity(d, ell):
    """Multiplicity of the Laplace-Beltrami eigenvalue ell(ell+d-1) on S^d.

    Equals (2 ell + d - 1)(ell + d - 2)! / ((d - 1)! ell!) for d >= 2; the
    binomial difference used here also covers the circle S^1.
    """
    d = check_dim(d, "d")
    ell = check_dim(ell, "ell", minimum=0)
    return math.comb(ell + d, d) - (math.comb(ell + d - 2, d) if ell >= 2 else 0)


def count_constant_potential(d, W):
    """Number of nonpositive eigenvalues of -Lap_{S^d} + d(d-2)/4 + W, W < 0 constant."""
    d = check_dim(d, "d", minimum=3)
    W = Fraction(W)
    if W >= 0:
        raise DomainError(f"W must be negative, got {W}")
    shift = Fraction(d * (d - 2), 4)
    total = 0
    ell = 0
    while ell * (ell + d - 1) + shift + W <= 0:
        total += multiplicity(d, ell)
        ell += 1
    return total


def ggm_coupling(d, L):
    """(L + (d-2)/2)(L + d/2) as an exact rational."""
    return (L + Fraction(d - 2, 2)) * (L + Fraction(d, 2))


def ggm_count_closed_form(d, L):
    """Closed form (2/d!) (L+d-1)! (L+d/2) / L!, returned as an exact Fraction."""
    return Fraction(2, math.factorial(d)) * Fraction(math.factorial(L + d - 1), math.factorial(L)) * (L + Fraction(d, 2))


def _log_a(d, L):
    c = (L + (d - 2) / 2) * (L + d / 2)
    return math.lgamma(L + d) + math.log(L + d / 2) - math.lgamma(L + 1) - d / 2 * math.log(c)


def a_value(d, L):
    """Ratio a_L of the count to L^cl_{0,d} times the integral of V_-^{d/2}."""
    return math.exp(_log_a(d, L))


def a_sequence(d, L_max):
    d = check_dim(d, "d", minimum=3)
    L_max = check_dim(L_max, "L_max", minimum=0)
    return [a_value(d, L) for L in range(L_max + 1)]


@dataclass(frozen=True)
class SphereCount:
    dim: int
    L: int
    nu_L: int
    n_leq: int
    integral_value: float
    a_L: float

    def to_dict(self):
        return {"d": self.dim, "L": self.L, "nu_L": self.nu_L, "N_leq": self.n_leq,
                "integral": self.integral_value, "a_L": self.a_L}


def sphere_count(d, L):
    d = check_dim(d, "d", minimum=3)
    L = check_dim(L, "L", minimum=0)
    n_leq = count_constant_potential(d, -ggm_coupling(d, L))
    integral = float(ggm_coupling(d, L)) ** (d / 2) * sphere_surface(d)
    return SphereCount(d, L, multiplicity(d, L), n_leq, integral, a_value(d, L))


def sphere_table(d, L_max):
    """Rows (d, L, nu_L, N_leq, a_L, running sup) for L = 0..L_max."""
    rows = []
    running = -math.inf
    for L in range(L_max + 1):
        sc = sphere_count(d, L)
        running = max(running, sc.a_L)
        row = sc.to_dict()
        row["running_sup"] = running
        rows.append(row)
    return rows


def sup_a(d, max_terms=100000):
    """Return (sup_L a_L, argmax L).

    a_L -> 1 with ln a_L = (d/2)/L + O(1/L^2). The scan stops once L > 2d,
    the sequence is decreasing and a_L has dropped below the running max;
    beyond that point the tail is monotone and cannot recover.
    """
    d = check_dim(d, "d", minimum=3)
    best, arg = -math.inf, 0
    prev = math.inf
    for L in range(max_terms):
        a = a_value(d, L)
        # ties (a_0 = a_1 in d = 6) resolve to the smallest L
        if a > best * (1 + 1e-12):
            best, arg = a, L
        if L > 2 * d and a < prev and a < best:
            break
        prev = a
    return best, arg


def ggm_conjectured_constant(d):
    """Conjectured optimal CLR constant L^cl_{0,d} sup_L a_L."""
    d = check_dim(d, "d", minimum=3)
    best, arg = sup_a(d)
    return ConstantValue(
        classical_L_value(0.0, d) * best,
        Kind.CONJECTURED,
        Direction.EXACT,
        f"Glaser-Grosse-Martin conjecture, sup attained at L={arg}",
        meta={"argmax_L": arg, "sup_a": best},
    )


def sobolev_one_particle_L0(d):
    """L^(1)_{0,d} = L^cl_{0,d} a_0, from the explicit Sobolev optimizers."""
    d = check_dim(d, "d", minimum=3)
    return ConstantValue(classical_L_value(0.0, d) * a_value(d, 0), Kind.ONE_PARTICLE, Direction.EXACT,
                         "Sobolev optimizer (Rodemich, Rosen, Aubin, Talenti)")


def ggm_integral(d, L):
    """Closed form int (V^(L))_-^{d/2} dx = ((L+(d-2)/2)(L+d/2))^{d/2} |S^d|."""
    return float(ggm_coupling(d, L)) ** (d / 2) * sphere_surface(d)


def ggm_potential(d, L):
    """Radial potential V^(L)(x) = -(L+(d-2)/2)(L+d/2) (2/(1+|x|^2))^2 on R^d."""
    from .spectral.potentials import PotentialSpec

    d = check_dim(d, "d", minimum=3)
    L = check_dim(L, "L", minimum=0)
    return PotentialSpec("ggm_sphere_image", {"L": L}, dim=d, radial=True)
