"""Finite-difference Schrodinger operators, Sturm counts and Richardson extrapolation."""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from sklearn.base import BaseEstimator

from .._validation import DomainError, ResolutionError, check_dim, check_positive
from ..sphere import multiplicity
from .potentials import PotentialSpec


class TruncationWarning(UserWarning):
    """Channel sum stopped at ell_max while channels still had bound states."""


@numba.njit(cache=True)
def _sturm_count(diag, off2, x):
    # number of eigenvalues < x from the signs of the LDL^T pivots
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if q < 0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - x - off2[i - 1] / q
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_all(diag, off2, lo, hi, k_max, tol):
    # k-th smallest eigenvalue for k = 1..k_max, each bracketed in [lo, hi]
    out = np.empty(k_max)
    lower = lo
    for k in range(1, k_max + 1):
        a = lower
        b = hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if _sturm_count(diag, off2, mid) >= k:
                b = mid
            else:
                a = mid
        out[k - 1] = 0.5 * (a + b)
        lower = a
    return out


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix of a discretized Schrodinger operator."""

    diag: np.ndarray
    off: np.ndarray
    nodes: np.ndarray
    step: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.diag, self.off, self.nodes):
            arr.setflags(write=False)

    @property
    def size(self):
        return self.diag.shape[0]

    def count_below(self, threshold):
        """Number of eigenvalues strictly below ``threshold`` (Sturm sequence)."""
        return int(_sturm_count(self.diag, self.off**2, float(threshold)))

    def gershgorin(self):
        a = np.abs(np.concatenate([self.off, [0.0]])) + np.abs(np.concatenate([[0.0], self.off]))
        return float(np.min(self.diag - a)), float(np.max(self.diag + a))

    def eigenvalues_below(self, threshold=0.0, tol=1e-12):
        """Eigenvalues < threshold by bisection on the Sturm count."""
        if threshold > 0:
            raise DomainError("threshold must be <= 0")
        k = self.count_below(threshold)
        if k == 0:
            return np.empty(0)
        lo = self.gershgorin()[0] - 1.0
        vals = _bisect_all(self.diag, self.off**2, lo, float(threshold), k, float(tol))
        return np.sort(vals)

    def smallest(self, k=1, tol=1e-12):
        """The k smallest eigenvalues regardless of sign."""
        lo, hi = self.gershgorin()
        return _bisect_all(self.diag, self.off**2, lo - 1.0, hi + 1.0, int(k), float(tol))

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def _sample(V, x):
    vals = np.asarray(V(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("potential has non-finite samples on the grid")
    return vals


def _cells(extent, step):
    check_positive(extent, "extent")
    check_positive(step, "step")
    ratio = extent / step
    n = int(round(ratio))
    if n < 2 or abs(ratio - n) > 1e-9 * ratio:
        raise DomainError(f"extent/step must be an integer >= 2, got {ratio}")
    return n


def discretize_1d(V, extent, step, hbar=1.0):
    """-hbar^2 d^2/dx^2 + V on [-X, X] with Dirichlet ends, nodes x_i = -X + i h."""
    n = _cells(extent, step)
    nodes = -extent + step * np.arange(1, 2 * n)
    kin = hbar**2 / step**2
    diag = 2 * kin + _sample(V, nodes)
    off = np.full(nodes.size - 1, -kin)
    return TridiagonalOperator(diag, off, nodes, step, {"extent": extent, "hbar": hbar, "kind": "line"})


def discretize_radial(V, dim, ell, extent, step):
    """Radial channel ell of -Delta + V in dimension ``dim``.

    Conservative (flux) differences on the cell centres r_i = (i - 1/2) h,
    symmetrized by the weight r_i^{d-1}; the flux through r = 0 vanishes and
    psi = 0 is imposed one half-cell beyond r = X.
    """
    dim = check_dim(dim, "dim", minimum=2)
    n = _cells(extent, step)
    i = np.arange(1, n + 1)
    r = (i - 0.5) * step
    r_out = i * step
    r_in = (i - 1) * step
    # ratios avoid overflow of r^{d-1} in high dimension
    w_out = (r_out / r) ** (dim - 1)
    w_in = (r_in / r) ** (dim - 1)
    diag = (w_out + w_in) / step**2 + ell * (ell + dim - 2) / r**2 + _sample(V, r)
    off = -((r_out[:-1] ** 2 / (r[:-1] * r[1:])) ** ((dim - 1) / 2)) / step**2
    return TridiagonalOperator(diag, off, r, step,
                               {"extent": extent, "dim": dim, "ell": ell, "kind": "radial"})


def richardson(levels):
    """Richardson table for values at steps h, h/2, h/4, ... (error in even powers of h).

    Returns (best, error_estimate).
    """
    table = [np.asarray(levels[0], dtype=float)]
    err = np.full_like(table[0], np.nan)
    for j in range(1, len(levels)):
        row = [np.asarray(levels[j], dtype=float)]
        for m in range(1, j + 1):
            row.append(row[m - 1] + (row[m - 1] - table[m - 1]) / (4**m - 1))
        err = np.abs(row[-1] - row[-2])
        table = row
    return table[-1], err


@dataclass
class SpectrumSummary:
    """Negative eigenvalues with multiplicities and the derived sums."""

    eigenvalues: np.ndarray
    weights: np.ndarray = None
    potential: object = None
    dim: int = 1
    grid_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        order = np.argsort(self.eigenvalues, kind="stable")
        self.eigenvalues = self.eigenvalues[order]
        if self.weights is None:
            self.weights = np.ones(self.eigenvalues.size, dtype=int)
        else:
            self.weights = np.asarray(self.weights, dtype=int)[order]

    def count_below(self, threshold=0.0):
        return int(np.sum(self.weights[self.eigenvalues < threshold]))

    def riesz_mean(self, gamma):
        """sum_n |E_n|^gamma with multiplicity (gamma = 0 counts)."""
        if gamma < 0:
            raise DomainError("gamma must be >= 0")
        e = np.abs(self.eigenvalues[self.eigenvalues < 0])
        w = self.weights[self.eigenvalues < 0]
        return float(np.sum(w * e**gamma))

    def potential_integral(self, gamma):
        if self.potential is None:
            raise DomainError("no potential attached; cannot form int V_-^{gamma+d/2}")
        return self.potential.negative_part_integral(gamma + self.dim / 2)

    def lt_ratio(self, gamma):
        return self.riesz_mean(gamma) / self.potential_integral(gamma)

    def rows(self):
        return [{"index": i, "energy": float(e), "multiplicity": int(w)}
                for i, (e, w) in enumerate(zip(self.eigenvalues, self.weights))]

    def to_dict(self):
        return {"dim": self.dim, "grid": self.grid_meta,
                "potential": self.potential.describe() if isinstance(self.potential, PotentialSpec) else None,
                "eigenvalues": self.rows()}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.DictWriter(buf, ["index", "energy", "multiplicity"], lineterminator="\n")
        wr.writeheader()
        for row in self.rows():
            wr.writerow({**row, "energy": repr(row["energy"])})
        return buf.getvalue()


class SchrodingerSpectrum(BaseEstimator):
    """Negative spectrum of -hbar^2 Delta + V by finite differences.

    The operator is discretized at steps h, h/2, ..., h/2^(levels-1) and the
    eigenvalues are Richardson-extrapolated. For a radial potential the
    solver works in the angular-momentum channel ``ell``.

    Attributes set by ``fit``: ``eigenvalues_``, ``raw_eigenvalues_``,
    ``error_estimate_``, ``operator_`` (finest grid) and ``summary_``.
    """

    def __init__(self, extent=20.0, step=0.01, levels=2, hbar=1.0, ell=0, threshold=0.0, tol=1e-13):
        self.extent = extent
        self.step = step
        self.levels = levels
        self.hbar = hbar
        self.ell = ell
        self.threshold = threshold
        self.tol = tol

    def _operator(self, V, h):
        if isinstance(V, PotentialSpec) and V.radial:
            if self.hbar != 1.0:
                raise DomainError("hbar != 1 is only supported on the line")
            return discretize_radial(V, V.dim, self.ell, self.extent, h)
        return discretize_1d(V, self.extent, h, self.hbar)

    def fit(self, V, y=None):
        levels = int(self.levels)
        if levels < 1:
            raise DomainError("levels must be >= 1")
        raw = []
        for j in range(levels):
            op = self._operator(V, self.step / 2**j)
            raw.append(op.eigenvalues_below(self.threshold, self.tol))
        counts = [r.size for r in raw]
        n = min(counts)
        best, err = richardson([r[:n] for r in raw])
        keep = best < self.threshold
        self.raw_eigenvalues_ = raw
        self.eigenvalues_ = best[keep]
        self.error_estimate_ = err[keep]
        self.operator_ = op
        dim = V.dim if isinstance(V, PotentialSpec) else 1
        self.summary_ = SpectrumSummary(
            self.eigenvalues_, None, V if isinstance(V, PotentialSpec) else None, dim,
            {"step": self.step, "levels": levels, "extent": self.extent, "hbar": self.hbar,
             "ell": self.ell, "counts_per_level": counts},
        )
        return self

    def riesz_mean(self, gamma):
        return self.summary_.riesz_mean(gamma)


def eigenvalues_below(op, threshold=0.0, tol=1e-12):
    """Fragment of a SpectrumSummary for a discretized operator."""
    return SpectrumSummary(op.eigenvalues_below(threshold, tol), grid_meta={"step": op.step, **op.meta})


def channel_multiplicity(dim, ell):
    """Number of spherical harmonics of degree ell in R^dim (1, 2, 2, ... for dim = 2)."""
    return multiplicity(check_dim(dim, "dim", minimum=2) - 1, ell)


def radial_channels(V, dim=None, ell_max=200, extent=20.0, step=0.01, levels=2, threshold=0.0):
    """Negative spectrum of a radial -Delta + V summed over channels with multiplicity.

    Channels are visited in increasing ell. The discrete operator increases
    with ell, so the first channel without eigenvalues below the threshold
    ends the sum.
    """
    if not isinstance(V, PotentialSpec) or not V.radial:
        raise DomainError("radial_channels needs a radial PotentialSpec")
    dim = V.dim if dim is None else check_dim(dim, "dim", minimum=2)
    if dim != V.dim:
        raise DomainError(f"dimension mismatch: potential has d={V.dim}, requested {dim}")
    energies, weights, per_channel = [], [], []
    truncated = True
    for ell in range(ell_max + 1):
        est = SchrodingerSpectrum(extent, step, levels, ell=ell, threshold=threshold).fit(V)
        if est.eigenvalues_.size == 0:
            truncated = False
            break
        mult = channel_multiplicity(dim, ell)
        energies.extend(est.eigenvalues_)
        weights.extend([mult] * est.eigenvalues_.size)
        per_channel.append({"ell": ell, "multiplicity": mult, "count": int(est.eigenvalues_.size)})
    if truncated:
        warnings.warn(f"ell_max={ell_max} reached while channels still contribute", TruncationWarning)
    return SpectrumSummary(np.array(energies), np.array(weights, dtype=int), V, dim,
                           {"step": step, "levels": levels, "extent": extent, "channels": per_channel,
                            "channel_cutoff": per_channel[-1]["ell"] + 1 if per_channel else 0,
                            "truncated": truncated})


def spectrum(V, extent=20.0, step=0.01, levels=2, hbar=1.0, ell_max=200):
    """SpectrumSummary for a 1D or radial PotentialSpec."""
    if isinstance(V, PotentialSpec) and V.radial:
        return radial_channels(V, ell_max=ell_max, extent=extent, step=step, levels=levels)
    return SchrodingerSpectrum(extent, step, levels, hbar).fit(V).summary_


def resolution(V, step, extent, alpha=1.0):
    """h * sqrt(alpha * sup|V|); grids with values above 0.1 are considered too coarse."""
    return step * math.sqrt(alpha * V.sup_norm(extent))


def check_resolution(V, step, extent, alpha=1.0, limit=0.1):
    value = resolution(V, step, extent, alpha)
    if value > limit:
        raise ResolutionError(f"h*sqrt(alpha*|V|) = {value:.3g} exceeds {limit}; refine the grid")
    return value


__all__ = [
    "TridiagonalOperator", "discretize_1d", "discretize_radial", "richardson", "SpectrumSummary",
    "SchrodingerSpectrum", "eigenvalues_below", "channel_multiplicity", "radial_channels", "spectrum",
    "resolution", "check_resolution", "TruncationWarning",
]
