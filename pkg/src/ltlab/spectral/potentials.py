"""Declarative potentials and the quadrature of their negative parts."""

import csv
import math
import shlex
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .._validation import DomainError, check_dim, check_increasing
from ..constants import sphere_area
from ..ground_state import soliton_1d


class Family(str, Enum):
    SQUARE_WELL = "square_well"
    GAUSSIAN = "gaussian"
    POSCHL_TELLER = "poschl_teller"
    SHIFTED_HARMONIC = "shifted_harmonic"
    GGM_SPHERE_IMAGE = "ggm_sphere_image"
    TWO_BUMP = "two_bump"
    TABULATED = "tabulated"


# alpha (coupling) and scale (dilation) are accepted by every family:
# V(x) = alpha * V_family(scale * x)
_COMMON = {"alpha": 1.0, "scale": 1.0}
_DEFAULTS = {
    Family.SQUARE_WELL: {"depth": 1.0, "width": 1.0},
    Family.GAUSSIAN: {"depth": 1.0, "width": 1.0},
    Family.POSCHL_TELLER: {"nu": 2.0, "width": 1.0},
    Family.SHIFTED_HARMONIC: {},
    Family.GGM_SPHERE_IMAGE: {"L": 0},
    Family.TWO_BUMP: {"gamma": 2.0, "R": 6.0},
    Family.TABULATED: {"file": None},
}


def two_bump_exponent(gamma):
    """p with p' = gamma + 1/2 (one dimension)."""
    if gamma <= 0.5:
        raise DomainError(f"two_bump needs gamma > 1/2, got {gamma}")
    pp = gamma + 0.5
    return pp / (pp - 1)


def _log_sech(y):
    y = np.abs(y)
    return math.log(2.0) - y - np.log1p(np.exp(-2 * y))


def bump_overlap_density(u, v, p):
    """(u+v)^p - u^p - v^p for u, v >= 0, without cancellation."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    big = np.maximum(u, v)
    small = np.minimum(u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
        out = big**p * (np.expm1(p * np.log1p(t)) - t**p)
    return np.where(big > 0, out, 0.0)


def load_tabulated(path):
    """Read a two-column CSV (abscissa, value); a non-numeric header row is skipped."""
    xs, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                if xs:
                    raise DomainError(f"malformed row in {path}: {row}") from None
                continue
            xs.append(x)
            vs.append(v)
    if len(xs) < 2:
        raise DomainError(f"{path} needs at least two samples")
    xs = check_increasing(np.array(xs), "abscissa")
    vs = np.array(vs)
    if not np.all(np.isfinite(vs)):
        raise DomainError("tabulated potential has non-finite values")
    return xs, vs


@dataclass(frozen=True)
class PotentialSpec:
    """A named potential family with parameters.

    ``dim`` is the space dimension; ``radial`` marks a function of |x| used
    with the radial channel solver. Tabulated data is linearly interpolated
    and set to zero outside the sampled range.
    """

    family: Family
    params: dict = field(default_factory=dict)
    dim: int = 1
    radial: bool = False

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        check_dim(self.dim, "dim")
        allowed = {**_COMMON, **_DEFAULTS[fam]}
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise DomainError(f"unknown parameters for {fam.value}: {sorted(unknown)}")
        merged = {**allowed, **self.params}
        for key, val in merged.items():
            if key != "file":
                merged[key] = float(val)
        if merged["scale"] <= 0:
            raise DomainError("scale must be positive")
        object.__setattr__(self, "params", merged)
        if self.dim > 1 and not self.radial:
            raise DomainError("potentials in d >= 2 must be radial")
        if fam is Family.GGM_SPHERE_IMAGE:
            if not self.radial or self.dim < 3:
                raise DomainError("ggm_sphere_image is a radial potential in d >= 3")
            if merged["L"] != int(merged["L"]) or merged["L"] < 0:
                raise DomainError("L must be a nonnegative integer")
        if fam is Family.TWO_BUMP:
            if self.dim != 1 or self.radial:
                raise DomainError("two_bump is one-dimensional")
            if merged["gamma"] <= 1.5:
                raise DomainError(f"two_bump needs gamma > 3/2, got {merged['gamma']}")
        if fam is Family.TABULATED:
            if merged["file"] is None:
                raise DomainError("tabulated potential needs file=path")
            object.__setattr__(self, "_table", load_tabulated(merged["file"]))
        for key in ("depth", "width", "nu"):
            if key in merged and merged[key] <= 0:
                raise DomainError(f"{key} must be positive")

    # -- evaluation ---------------------------------------------------------
    def _base(self, x):
        prm = self.params
        fam = self.family
        if fam is Family.SQUARE_WELL:
            w, depth = prm["width"], prm["depth"]
            ax = np.abs(x)
            eps = 1e-9 * max(1.0, w)
            # jump nodes get the mean value, which keeps the scheme O(h^2)
            return np.where(ax < w - eps, -depth, np.where(ax <= w + eps, -0.5 * depth, 0.0))
        if fam is Family.GAUSSIAN:
            return -prm["depth"] * np.exp(-((x / prm["width"]) ** 2))
        if fam is Family.POSCHL_TELLER:
            nu, w = prm["nu"], prm["width"]
            return -nu * (nu + 1) / w**2 * np.exp(2 * _log_sech(x / w))
        if fam is Family.SHIFTED_HARMONIC:
            return x**2 - 1.0
        if fam is Family.GGM_SPHERE_IMAGE:
            L, d = prm["L"], self.dim
            return -(L + (d - 2) / 2) * (L + d / 2) * (2.0 / (1.0 + x**2)) ** 2
        if fam is Family.TWO_BUMP:
            p = two_bump_exponent(prm["gamma"])
            half = prm["R"] / 2
            qp = soliton_1d(x - half, p) ** 2
            qm = soliton_1d(x + half, p) ** 2
            return -((qp + qm) ** (p - 1))
        xs, vs = self._table
        return np.interp(x, xs, vs, left=0.0, right=0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.params["alpha"] * self._base(self.params["scale"] * x)

    def breakpoints(self):
        """Points (in x) where the potential or its negative part has kinks."""
        s = self.params["scale"]
        fam = self.family
        if fam is Family.SQUARE_WELL:
            w = self.params["width"]
            pts = [w] if self.radial else [-w, w]
        elif fam is Family.SHIFTED_HARMONIC:
            pts = [1.0] if self.radial else [-1.0, 1.0]
        elif fam is Family.TWO_BUMP:
            h = self.params["R"] / 2
            pts = [-h, 0.0, h]
        elif fam is Family.TABULATED:
            pts = list(self._table[0])
        else:
            pts = []
        return [x / s for x in pts]

    def length_scale(self):
        """Rough extent of the well, used to size integration windows."""
        s = self.params["scale"]
        fam = self.family
        if fam is Family.TWO_BUMP:
            base = self.params["R"] / 2 + 1.0
        elif fam is Family.TABULATED:
            base = float(np.max(np.abs(self._table[0])))
        elif fam in (Family.SQUARE_WELL, Family.GAUSSIAN, Family.POSCHL_TELLER):
            base = self.params["width"]
        else:
            base = 1.0
        return base / s

    def sup_norm(self, extent):
        """max |V| sampled densely on the working domain."""
        grid = np.linspace(0 if self.radial else -extent, extent, 200001)
        vals = np.abs(self(grid))
        pts = np.array([b for b in self.breakpoints() if abs(b) <= extent])
        if pts.size:
            vals = np.concatenate([vals, np.abs(self(pts))])
        return float(np.max(vals))

    def is_nonpositive(self, extent=None):
        extent = extent or 50 * self.length_scale()
        grid = np.linspace(0 if self.radial else -extent, extent, 200001)
        return bool(np.all(self(grid) <= 0))

    def negative_part_integral(self, kappa, rtol=1e-12, closed_form=True):
        """int V_-^kappa dx over R^d by adaptive quadrature (never a grid sum).

        Closed forms are used where they exist (the two-bump well at its own
        exponent, the stereographic wells at kappa = d/2) unless
        ``closed_form`` is false.
        """
        kappa = float(kappa)
        if kappa <= 0:
            raise DomainError(f"kappa must be positive, got {kappa}")
        d = self.dim
        alpha, s = self.params["alpha"], self.params["scale"]
        if closed_form and self.family is Family.GGM_SPHERE_IMAGE and kappa == d / 2:
            from ..sphere import ggm_integral

            return ggm_integral(d, int(self.params["L"])) * alpha**kappa / s**d

        if closed_form and self.family is Family.TWO_BUMP and kappa == self.params["gamma"] + 0.5:
            return two_bump_integrals(self.params["gamma"], self.params["R"])["norm_V"] * alpha**kappa / s

        def f(x):
            v = -float(self(x))
            val = v**kappa if v > 0 else 0.0
            return val * x ** (d - 1) if self.radial else val

        ell = self.length_scale()
        pts = sorted(set(self.breakpoints()))
        if self.radial:
            inner_hi = max([8 * ell] + [b for b in pts if b > 0])
            segs = [0.0] + [b for b in pts if 0 < b < inner_hi] + [inner_hi]
        else:
            inner_hi = max([8 * ell] + [abs(b) for b in pts])
            segs = [-inner_hi] + [b for b in pts if -inner_hi < b < inner_hi] + [inner_hi]
        total, err = 0.0, 0.0
        for a, b in zip(segs[:-1], segs[1:]):
            if b > a:
                v, e = integrate.quad(f, a, b, epsabs=0, epsrel=rtol, limit=500)
                total += v
                err += e
        if self.family is not Family.TABULATED and self.family is not Family.SQUARE_WELL:
            tails = [(inner_hi, np.inf)] if self.radial else [(inner_hi, np.inf), (-np.inf, -inner_hi)]
            for a, b in tails:
                v, e = integrate.quad(f, a, b, epsabs=0, epsrel=rtol, limit=500)
                total += v
                err += e
        if not math.isfinite(total):
            raise DomainError(f"int V_-^{kappa} is not finite")
        if self.radial:
            total *= sphere_area(d)
        return total

    def describe(self):
        keys = [k for k in self.params if k not in _COMMON or self.params[k] != _COMMON[k]]
        body = " ".join(f"{k}={_fmt(self.params[k])}" for k in keys)
        extra = f" dim={self.dim}" if self.dim != 1 else ""
        return f"{self.family.value} {body}{extra}".strip()


def _fmt(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def parse_potential(text, dim=None):
    """Parse the compact form ``family key=value ...``.

    ``dim=`` may appear among the keys; potentials in d >= 2 are radial.
    Examples: ``poschl_teller nu=2``, ``two_bump gamma=2 R=6``,
    ``tabulated file=path.csv``, ``ggm_sphere_image L=1 dim=3``.
    """
    tokens = shlex.split(text)
    if not tokens:
        raise DomainError("empty potential description")
    try:
        family = Family(tokens[0])
    except ValueError:
        raise DomainError(f"unknown potential family {tokens[0]!r}") from None
    params = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise DomainError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key in params:
            raise DomainError(f"duplicate key {key!r}")
        params[key] = val if key == "file" else _to_float(key, val)
    d = int(params.pop("dim", dim or 1))
    radial = bool(params.pop("radial", d > 1))
    return PotentialSpec(family, params, dim=d, radial=radial)


def _to_float(key, val):
    try:
        return float(val)
    except ValueError:
        raise DomainError(f"parameter {key} must be numeric, got {val!r}") from None


def two_bump_integrals(gamma, R, rtol=1e-13):
    """Mass m, int Q^{2p}, overlap A and int V_-^{gamma+1/2} for separation R.

    The overlap integrand is symmetric about 0 and concentrated between
    the bumps; it is integrated on [0, inf) with a break at the bump centre.
    """
    p = two_bump_exponent(gamma)
    q2 = lambda x: soliton_1d(x, p) ** 2  # noqa: E731
    mass = 2 * integrate.quad(lambda x: float(q2(x)), 0, np.inf, epsabs=0, epsrel=rtol, limit=400)[0]
    n2p = 2 * integrate.quad(lambda x: float(q2(x)) ** p, 0, np.inf, epsabs=0, epsrel=rtol, limit=400)[0]
    half = R / 2

    def dens(x):
        return float(bump_overlap_density(q2(x - half), q2(x + half), p))

    segs = [(0.0, half), (half, half + 40.0), (half + 40.0, np.inf)]
    overlap = sum(integrate.quad(dens, a, b, epsabs=0, epsrel=rtol, limit=400)[0] for a, b in segs)
    # 2 int dens over [0, inf) is the full-line integral; A is half of it
    A = overlap
    return {"p": p, "mass": mass, "norm2p": n2p, "A": A, "norm_V": 2 * n2p + 2 * A}
