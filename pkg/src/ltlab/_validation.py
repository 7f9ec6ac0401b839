"""Input validation helpers shared by the estimators and free functions."""

import math
import numbers

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SolverError(RuntimeError):
    """A numerical solver failed to bracket or converge."""


class AccuracyError(RuntimeError):
    """A computation finished but missed its accuracy contract."""


class ResolutionError(AccuracyError):
    """The discretization is too coarse for the requested computation."""


def check_positive(value, name, strict=True):
    value = check_real(value, name)
    if strict and not value > 0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


def check_real(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_dim(d, name="dim", minimum=1):
    if isinstance(d, bool) or not isinstance(d, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {d!r}")
    d = int(d)
    if d < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {d}")
    return d


def is_admissible(gamma, dim):
    """Return True if (gamma, dim) lies in the Lieb-Thirring validity region."""
    if gamma < 0:
        return False
    if dim == 1:
        return gamma >= 0.5
    if dim == 2:
        return gamma > 0
    return True


def check_finite_array(values, name):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name} contains non-finite entries")
    return values


def check_increasing(x, name):
    x = check_finite_array(x, name)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise DomainError(f"{name} must be a strictly increasing 1-D array")
    return x
