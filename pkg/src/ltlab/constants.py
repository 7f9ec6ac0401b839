"""Closed-form constants: semiclassical values, duality maps and literature bounds.

Conventions
-----------
``L`` constants bound Riesz means of Schrodinger eigenvalues,

    sum_n |E_n(-Delta + V)|**gamma <= L * int V_-**(gamma + d/2) dx,

while ``K`` constants are the kinetic-energy (Sobolev-type) constants dual
to them.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from scipy.special import beta as _beta

from ._validation import DomainError, check_dim, check_positive, check_real, is_admissible


class Kind(str, Enum):
    CLASSICAL = "classical"
    ONE_PARTICLE = "one_particle"
    IMPROVED_BOUND = "improved_bound"
    CONJECTURED = "conjectured"
    LITERATURE = "literature"


class Direction(str, Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class GammaDim:
    """A Riesz exponent and space dimension in the admissible region.

    The pair is admissible when gamma >= 1/2 in d = 1, gamma > 0 in d = 2
    and gamma >= 0 in d >= 3.
    """

    gamma: float
    dim: int

    def __post_init__(self):
        gamma = check_real(self.gamma, "gamma")
        dim = check_dim(self.dim)
        if not is_admissible(gamma, dim):
            raise DomainError(f"(gamma={gamma}, d={dim}) is outside the admissible region")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "dim", dim)


@dataclass(frozen=True)
class ConstantValue:
    """A positive constant together with what is known about it."""

    value: float
    kind: Kind
    direction: Direction
    provenance: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        value = float(self.value)
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"constant value must be finite and positive, got {value!r}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "direction", Direction(self.direction))

    def __float__(self):
        return self.value

    def to_dict(self):
        return {
            "value": self.value,
            "kind": self.kind.value,
            "direction": self.direction.value,
            "provenance": self.provenance,
        }


def _as_gamma_dim(gd, dim=None):
    if isinstance(gd, GammaDim):
        return gd
    if dim is None:
        gamma, dim = gd
    else:
        gamma = gd
    return GammaDim(gamma, dim)


def gamma_fn(x):
    """Euler's Gamma function for positive arguments."""
    x = check_real(x, "x")
    if x <= 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def unit_ball_volume(d):
    """Volume of the unit ball in R^d."""
    d = check_dim(d, "d")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_area(d):
    """Surface area of the unit sphere S^{d-1} bounding the unit ball of R^d."""
    d = check_dim(d, "d")
    return d * unit_ball_volume(d)


def classical_L(gd, dim=None):
    """Semiclassical constant L^cl_{gamma,d} = (4 pi)^{-d/2} Gamma(g+1) / Gamma(g+1+d/2)."""
    gd = _as_gamma_dim(gd, dim)
    g, d = gd.gamma, gd.dim
    value = (4 * math.pi) ** (-d / 2) * math.exp(math.lgamma(g + 1) - math.lgamma(g + 1 + d / 2))
    return ConstantValue(value, Kind.CLASSICAL, Direction.EXACT, "Weyl asymptotics, phase-space volume")


def classical_L_value(gamma, d):
    """Float shortcut for ``classical_L`` without admissibility checks (gamma >= 0)."""
    return (4 * math.pi) ** (-d / 2) * math.exp(math.lgamma(gamma + 1) - math.lgamma(gamma + 1 + d / 2))


def classical_K(d):
    """Semiclassical kinetic constant K^cl_d = d/(d+2) (2 pi)^2 / omega_d^{2/d}."""
    d = check_dim(d, "d")
    value = d / (d + 2) * (2 * math.pi) ** 2 / unit_ball_volume(d) ** (2 / d)
    return ConstantValue(value, Kind.CLASSICAL, Direction.EXACT, "plane-wave trial states")


def duality_K_from_L(L, d):
    """Solve ((1+d/2) L)^{1+2/d} ((1+2/d) K)^{1+d/2} = 1 for K."""
    L = check_positive(float(L), "L")
    d = check_dim(d, "d")
    # log form avoids overflow for extreme L
    log_k = -(1 + 2 / d) / (1 + d / 2) * math.log((1 + d / 2) * L) - math.log(1 + 2 / d)
    return math.exp(log_k)


def duality_L_from_K(K, d):
    """Inverse of :func:`duality_K_from_L`."""
    K = check_positive(float(K), "K")
    d = check_dim(d, "d")
    log_l = -(1 + d / 2) / (1 + 2 / d) * math.log((1 + 2 / d) * K) - math.log(1 + d / 2)
    return math.exp(log_l)


def max_sobolev_exponent(d):
    """Largest admissible p in the interpolation inequality (inf for d <= 2)."""
    d = check_dim(d, "d")
    return math.inf if d <= 2 else d / (d - 2)


def _check_p(p, d):
    p = check_real(p, "p")
    if not (1 < p <= max_sobolev_exponent(d)):
        raise DomainError(f"p={p} outside (1, {max_sobolev_exponent(d)}] for d={d}")
    return p


def keller_factor(p, d):
    """Right-hand side (d/2p')^{d/2} ((2p'-d)/2p')^{(2p'-d)/2} of the Keller duality."""
    d = check_dim(d, "d")
    p = _check_p(p, d)
    pp = math.inf if math.isinf(p) else p / (p - 1)
    # 0**0 := 1 when 2p' = d (gamma = 0)
    excess = (2 * pp - d) / (2 * pp)
    log_f = d / 2 * math.log(d / (2 * pp))
    if excess > 0:
        log_f += (2 * pp - d) / 2 * math.log(excess)
    return math.exp(log_f)


def keller_duality(p, d, K1):
    """One-particle L constant for gamma = p' - d/2 from the Sobolev constant K1.

    Solves L * K1^{d/2} = (d/(2p'))^{d/2} ((2p'-d)/(2p'))^{(2p'-d)/2}
    with p' = p/(p-1).
    """
    d = check_dim(d, "d")
    K1 = check_positive(float(K1), "K1")
    return keller_factor(p, d) / K1 ** (d / 2)


def keller_duality_inverse(p, d, L1):
    """Sobolev constant K^(1)_{p,d} from the one-particle constant L^(1)_{p'-d/2,d}."""
    d = check_dim(d, "d")
    L1 = check_positive(float(L1), "L1")
    return (keller_factor(p, d) / L1) ** (2 / d)


def conjugate_p(gamma, d):
    """Exponent p with p/(p-1) = gamma + d/2."""
    pp = gamma + d / 2
    if pp <= 1:
        raise DomainError(f"gamma + d/2 must exceed 1, got {pp}")
    return pp / (pp - 1)


def one_particle_L_1d(gamma):
    """Closed-form one-particle constant L^(1)_{gamma,1} for gamma >= 1/2."""
    gamma = check_real(gamma, "gamma")
    if gamma < 0.5:
        raise DomainError(f"one_particle_L_1d requires gamma >= 1/2, got {gamma}")
    a, b = gamma - 0.5, gamma + 0.5
    log_v = (
        -0.5 * math.log(math.pi)
        + math.lgamma(gamma + 1)
        - math.lgamma(gamma + 0.5)
        - b * math.log(b)
    )
    if a > 0:
        log_v += a * math.log(a)
    return ConstantValue(math.exp(log_v), Kind.ONE_PARTICLE, Direction.EXACT, "Nagy's optimal 1D interpolation constant")


def aizenman_lieb_constant(gamma, sigma):
    """C with E_-^sigma = C int_0^inf (E+tau)_-^gamma tau^{sigma-gamma-1} dtau.

    In closed form C = 1 / B(sigma - gamma, gamma + 1).
    """
    gamma = check_positive(gamma, "gamma", strict=False)
    sigma = check_real(sigma, "sigma")
    if sigma <= gamma:
        raise DomainError(f"need sigma > gamma, got sigma={sigma}, gamma={gamma}")
    return 1.0 / _beta(sigma - gamma, gamma + 1)


# Literature bounds on the optimal L_{gamma,d}, as multiples of L^cl_{gamma,d}.
RUMIN_LIFT_FACTOR = 1.456
LIEB_CLR_FACTOR_3D = 6.86924
BEST_K_FACTOR = 0.471851


def best_known_bounds(gd, dim=None):
    """Literature table of bounds on the optimal constant L_{gamma,d}."""
    gd = _as_gamma_dim(gd, dim)
    g, d = gd.gamma, gd.dim
    lcl = classical_L_value(g, d)
    out = []

    def add(value, kind, direction, prov):
        out.append(ConstantValue(value, kind, direction, prov))

    if g >= 1.5:
        add(lcl, Kind.CLASSICAL, Direction.EXACT, "optimal for gamma >= 3/2 (Lieb-Thirring, Aizenman-Lieb, Laptev-Weidl)")
    elif g >= 1:
        add(RUMIN_LIFT_FACTOR * lcl, Kind.LITERATURE, Direction.UPPER_BOUND,
            "1.456 L^cl via a Rumin-type kinetic bound and dimension lifting")
    elif g >= 0.5:
        if d == 1:
            add(2 * lcl, Kind.LITERATURE, Direction.UPPER_BOUND, "2 L^cl (Hundertmark-Lieb-Thomas)")
            if g == 0.5:
                add(one_particle_L_1d(0.5).value, Kind.ONE_PARTICLE, Direction.EXACT,
                    "L_{1/2,1} = L^(1)_{1/2,1} = 1/2 (Hundertmark-Lieb-Thomas)")
        else:
            add(2.912 * lcl, Kind.LITERATURE, Direction.UPPER_BOUND,
                "2.912 L^cl via lifting (Hundertmark-Laptev-Weidl) and the 1.456 bound")
    elif d == 3:
        add(LIEB_CLR_FACTOR_3D * lcl, Kind.LITERATURE, Direction.UPPER_BOUND,
            "6.86924 L^cl (Lieb), propagated in gamma by the Aizenman-Lieb argument" if g > 0
            else "6.86924 L^cl (Lieb)")
        if g == 0:
            add(8 / math.sqrt(3) * lcl, Kind.ONE_PARTICLE, Direction.LOWER_BOUND,
                "(8/sqrt 3) L^cl from the Sobolev optimizer")
    return out


def best_upper_bound(gd, dim=None):
    """Smallest recorded upper (or exact) value for L_{gamma,d}, or None."""
    ups = [c.value for c in best_known_bounds(gd, dim) if c.direction is not Direction.LOWER_BOUND]
    return min(ups) if ups else None
