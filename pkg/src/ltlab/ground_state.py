"""Radial ground state of -Delta Q - Q^{2p-1} = -Q and the one-particle constants.

The positive decaying solution is found by shooting on Q(0): too small a
start value makes the trajectory turn back up before reaching zero, too
large a value makes it cross zero. Bisection between the two outcomes
converges to the ground state.
"""

import functools
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from sklearn.base import BaseEstimator

from ._validation import AccuracyError, DomainError, SolverError, check_dim, check_real
from .constants import (
    ConstantValue,
    Direction,
    GammaDim,
    Kind,
    classical_L_value,
    conjugate_p,
    keller_duality_inverse,
    max_sobolev_exponent,
    one_particle_L_1d,
    sphere_area,
)
from .sphere import sobolev_one_particle_L0


@dataclass(frozen=True)
class RadialProfile:
    """Sampled ground state with its integrals over R^d."""

    dim: int
    p: float
    r_grid: np.ndarray
    q_values: np.ndarray
    dq_values: np.ndarray
    mass: float
    kinetic: float
    norm2p: float
    pohozaev_residuals: tuple
    q0: float

    @property
    def max_pohozaev_residual(self):
        return max(abs(x) for x in self.pohozaev_residuals)

    def to_csv(self, path=None):
        buf = io.StringIO()
        buf.write("r,Q\n")
        for r, q in zip(self.r_grid, self.q_values):
            buf.write(f"{r:.10g},{q:.16e}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def summary(self):
        return {
            "dim": self.dim,
            "p": self.p,
            "Q0": self.q0,
            "mass": self.mass,
            "kinetic": self.kinetic,
            "norm2p": self.norm2p,
            "pohozaev_residuals": list(self.pohozaev_residuals),
            "r_max": float(self.r_grid[-1]),
        }


def _check_subcritical(d, p):
    p = check_real(p, "p")
    p_max = max_sobolev_exponent(d)
    if not 1 < p < p_max:
        raise DomainError(f"p={p} must lie in (1, {p_max}) for d={d}")
    return p


class GroundStateSolver(BaseEstimator):
    """Shooting solver for the radial positive ground state.

    Parameters
    ----------
    dim : int
        Space dimension d.
    p : float
        Nonlinearity exponent; the equation is Q'' + (d-1)/r Q' = Q - Q^{2p-1}.
    r_start : float
        Radius where the series start Q0 + (Q0 - Q0^{2p-1}) r^2 / (2d) hands over.
    rtol, atol : float
        Tolerances of the embedded Runge-Kutta integrator.
    q0_tol : float
        Relative width at which the bisection on Q(0) stops.
    grid_step : float
        Step of the uniform grid used for the Simpson integrals.
    cutoff : float
        The profile is truncated where Q falls below ``cutoff * Q(0)``.
    residual_tol : float
        Relative Pohozaev residual above which ``fit`` raises.
    bracket : tuple or None
        Optional initial bracket (low, high) for Q(0).
    """

    def __init__(self, dim=1, p=3.0, r_start=1e-4, rtol=1e-12, atol=1e-14, q0_tol=1e-15,
                 grid_step=2e-3, cutoff=1e-7, residual_tol=1e-6, bracket=None, method="DOP853"):
        self.dim = dim
        self.p = p
        self.r_start = r_start
        self.rtol = rtol
        self.atol = atol
        self.q0_tol = q0_tol
        self.grid_step = grid_step
        self.cutoff = cutoff
        self.residual_tol = residual_tol
        self.bracket = bracket
        self.method = method

    def _rhs(self, r, y):
        q, dq = y
        return [dq, q - abs(q) ** (2 * self.p - 2) * q - (self.dim - 1) / r * dq]

    def _series(self, q0, r):
        f = q0 - q0 ** (2 * self.p - 1)
        return q0 + f * r * r / (2 * self.dim), f * r / self.dim

    def _solve(self, q0, r_end, dense=False, stop_at=None):
        def crosses_zero(r, y):
            return y[0]

        def turns_up(r, y):
            return y[1]

        crosses_zero.terminal = True
        crosses_zero.direction = -1
        turns_up.terminal = True
        turns_up.direction = 1
        events = [crosses_zero, turns_up]
        if stop_at is not None:
            def low(r, y):
                return y[0] - stop_at
            low.terminal = True
            low.direction = -1
            events.append(low)
        q, dq = self._series(q0, self.r_start)
        return integrate.solve_ivp(self._rhs, (self.r_start, r_end), [q, dq], method=self.method,
                                   rtol=self.rtol, atol=self.atol, events=events, dense_output=dense)

    def classify(self, q0, r_end=80.0):
        """Return +1 if the trajectory crosses zero, -1 if it turns back up, 0 otherwise."""
        if q0 <= 1.0:
            return -1
        sol = self._solve(q0, r_end)
        if sol.t_events[0].size:
            return 1
        if sol.t_events[1].size:
            return -1
        return 0

    def _bracket(self):
        if self.bracket is not None:
            lo, hi = map(float, self.bracket)
            if self.classify(lo) >= 0 or self.classify(hi) <= 0:
                raise SolverError(f"bracket {self.bracket} does not separate the shooting outcomes")
            return lo, hi
        lo, hi = 1.0, 2.0
        for _ in range(60):
            outcome = self.classify(hi)
            if outcome > 0:
                return lo, hi
            lo, hi = hi, 2 * hi
        raise SolverError(f"no sign-changing start value found below {hi} for d={self.dim}, p={self.p}")

    def fit(self, X=None, y=None):
        d = check_dim(self.dim)
        _check_subcritical(d, self.p)
        lo, hi = self._bracket()
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            if hi - lo <= self.q0_tol * hi or mid in (lo, hi):
                break
            outcome = self.classify(mid)
            if outcome > 0:
                hi = mid
            elif outcome < 0:
                lo = mid
            else:
                lo = hi = mid
                break
        self.q0_ = 0.5 * (lo + hi)
        self.bracket_ = (lo, hi)
        self.profile_ = self._profile(self.q0_)
        res = self.profile_.max_pohozaev_residual
        if res > self.residual_tol:
            raise AccuracyError(f"Pohozaev residual {res:.2e} exceeds {self.residual_tol:.0e} (d={d}, p={self.p})")
        return self

    def _profile(self, q0):
        d, p = self.dim, self.p
        sol = self._solve(q0, 200.0, dense=True, stop_at=self.cutoff * q0)
        r_cut = sol.t[-1]
        n = max(int(math.ceil(r_cut / self.grid_step)), 2)
        n += n % 2  # Simpson wants an even number of panels
        r = np.linspace(0.0, r_cut, n + 1)
        q = np.empty_like(r)
        dq = np.empty_like(r)
        inner = r < self.r_start
        q[inner], dq[inner] = self._series(q0, r[inner])
        q[~inner], dq[~inner] = sol.sol(r[~inner])

        area = sphere_area(d)
        w = r ** (d - 1)
        qa = np.abs(q)
        mass = area * integrate.simpson(q * q * w, x=r)
        kinetic = area * integrate.simpson(dq * dq * w, x=r)
        norm2p = area * integrate.simpson(qa ** (2 * p) * w, x=r)
        # exponential tail beyond the cut, Q ~ C r^{-(d-1)/2} e^{-r}
        qc, rc = q[-1], r[-1]
        mass += area * qc**2 * rc ** (d - 1) / 2
        kinetic += area * qc**2 * rc ** (d - 1) / 2
        norm2p += area * qc ** (2 * p) * rc ** (d - 1) / (2 * p)

        res1 = (kinetic - norm2p + mass) / mass
        res2 = ((d / 2 - 1) * kinetic - d / (2 * p) * norm2p + d / 2 * mass) / mass
        return RadialProfile(d, p, r, q, dq, mass, kinetic, norm2p, (res1, res2), q0)


@functools.lru_cache(maxsize=256)
def _cached_profile(d, p, options):
    return GroundStateSolver(dim=d, p=p, **dict(options)).fit().profile_


def shoot_ground_state(d, p, **options):
    """Radial ground state for (d, p); results are memoized per option set."""
    d = check_dim(d, "d")
    p = _check_subcritical(d, p)
    return _cached_profile(d, p, tuple(sorted(options.items())))


def soliton_1d(x, p):
    """Closed-form 1D solution Q(x) = (p sech^2((p-1) x))^{1/(2p-2)}."""
    x = np.asarray(x, dtype=float)
    # sech^2 via exp keeps large |x| finite
    u = np.exp(-2 * (p - 1) * np.abs(x))
    sech2 = 4 * u / (1 + u) ** 2
    return (p * sech2) ** (1 / (2 * p - 2))


def one_particle_L(gd, dim=None, **options):
    """One-particle constant L^(1)_{gamma,d} as a ConstantValue.

    d = 1 uses the closed form; d >= 2 uses 1 / int Q^{2p} with
    p/(p-1) = gamma + d/2; gamma = 0 in d >= 3 uses the Sobolev optimizer.
    """
    if not isinstance(gd, GammaDim):
        gd = GammaDim(gd, dim) if dim is not None else GammaDim(*gd)
    g, d = gd.gamma, gd.dim
    if d == 1:
        return one_particle_L_1d(g)
    if g == 0:
        return sobolev_one_particle_L0(d)
    prof = shoot_ground_state(d, conjugate_p(g, d), **options)
    return ConstantValue(1.0 / prof.norm2p, Kind.ONE_PARTICLE, Direction.EXACT,
                         "1 / int Q^{2p} from the shooting ground state",
                         meta={"p": prof.p, "Q0": prof.q0, "pohozaev": prof.pohozaev_residuals})


def one_particle_K(p, d, **options):
    """Optimal constant K^(1)_{p,d} of the Sobolev interpolation inequality.

    For p = 1 + 2/d this is (d/(d+2)) ||Q||_2^{4/d}; otherwise it is
    obtained from one_particle_L through the Keller duality.
    """
    d = check_dim(d, "d")
    p = _check_subcritical(d, p)
    prof = shoot_ground_state(d, p, **options)
    if math.isclose(p, 1 + 2 / d, rel_tol=0, abs_tol=1e-14):
        value = d / (d + 2) * prof.mass ** (2 / d)
        how = "d/(d+2) ||Q||_2^{4/d}"
    else:
        value = keller_duality_inverse(p, d, 1.0 / prof.norm2p)
        how = "Keller duality from 1 / int Q^{2p}"
    return ConstantValue(value, Kind.ONE_PARTICLE, Direction.EXACT, how)


def sobolev_quotient(profile):
    """Interpolation-inequality quotient of Q; equals K^(1)_{p,d} at the optimizer."""
    d, p = profile.dim, profile.p
    e1 = 2 / (d * (p - 1))
    e2 = -2 * p / (d * (p - 1)) + 1
    return profile.kinetic / (profile.norm2p**e1 * profile.mass**e2)


def one_particle_ratio(gamma, d, **options):
    """L^(1)_{gamma,d} / L^cl_{gamma,d}."""
    return one_particle_L(GammaDim(gamma, d), **options).value / classical_L_value(gamma, d)


def gamma_crossing(d, bracket=(0.01, 3.0), xtol=1e-6, **options):
    """Exponent gamma_c(d) where L^(1)_{gamma,d} = L^cl_{gamma,d}.

    The ratio L^(1)/L^cl is strictly decreasing in gamma, so the root is
    bracketed by scanning down from the upper end of ``bracket`` until the
    ratio exceeds one, then refined by Brent's method.
    """
    d = check_dim(d, "d")
    if d > 7:
        raise DomainError("no crossing exists for d >= 8 (L^(1) < L^cl for every gamma)")
    lo, hi = map(float, bracket)
    if d == 1:
        lo = max(lo, 0.5)
        xtol = min(xtol, 1e-13)

    def f(g):
        return one_particle_ratio(g, d, **options) - 1.0

    f_hi = f(hi)
    if f_hi >= 0:
        raise SolverError(f"L^(1) >= L^cl at gamma={hi}; no crossing in bracket")
    # scan towards the lower end; the ratio is monotone so the first sign change brackets the root
    candidates = [g for g in (1.5, 1.0, 0.75, 0.5, 0.25, 0.1) if lo < g < hi] + [lo]
    upper = hi
    for g in candidates:
        if f(g) > 0:
            return optimize.brentq(f, g, upper, xtol=xtol, rtol=4 * np.finfo(float).eps)
        upper = g
    raise SolverError(f"no sign change of L^(1)/L^cl - 1 in [{lo}, {hi}] for d={d}")
