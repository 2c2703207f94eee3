"""Input validation helpers shared by the estimators and functional API."""

import math
import numbers

import numpy as np

from .exceptions import InvalidInputError, InvalidLagError

TWO_PI = 2.0 * np.pi


def check_circular_series(series, name="series"):
    """Return ``series`` as a 1-D float array of angles in ``[0, 2*pi)``.

    Finite values outside the range are reduced modulo ``2*pi``.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    out = np.mod(arr, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out[out >= TWO_PI] = 0.0
    return out


def check_real_series(series, name="series"):
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_dataset(dataset, circular=True):
    """Validate a sequence of series (possibly of unequal lengths)."""
    if isinstance(dataset, np.ndarray) and dataset.ndim == 2:
        dataset = list(dataset)
    series = list(dataset)
    if not series:
        raise InvalidInputError("dataset is empty")
    check = check_circular_series if circular else check_real_series
    return [check(s, name=f"series {i}") for i, s in enumerate(series)]


def check_level(p, name="level"):
    if not isinstance(p, numbers.Real) or not math.isfinite(p) or not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"{name} must lie in [0, 1], got {p!r}")
    return float(p)


def check_radius(w):
    if not isinstance(w, numbers.Real) or not math.isfinite(w) or not 0.0 <= w < np.pi:
        raise InvalidInputError(f"radius must lie in [0, pi), got {w!r}")
    return float(w)


def check_lag(lag, length):
    if isinstance(lag, bool) or not isinstance(lag, numbers.Integral):
        raise InvalidLagError(f"lag must be an integer, got {lag!r}")
    if not 1 <= lag < length:
        raise InvalidLagError(f"lag {lag} outside 1..{length - 1} for a series of length {length}")
    return int(lag)


def check_lags(lags):
    lags = tuple(int(l) for l in np.atleast_1d(lags))
    if not lags or any(l < 1 for l in lags):
        raise InvalidLagError(f"lags must be a non-empty set of positive integers, got {lags}")
    return lags


def check_levels(levels):
    levels = tuple(check_level(float(t)) for t in np.atleast_1d(levels))
    if not levels:
        raise InvalidInputError("levels must be non-empty")
    return levels


def check_square_matrix(D, name="D"):
    """Validate a dissimilarity matrix: square, finite, symmetric, zero diagonal."""
    D = np.asarray(getattr(D, "values", D), dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if np.any(D < 0):
        raise InvalidInputError(f"{name} has negative entries")
    scale = max(1.0, float(np.abs(D).max()))
    if not np.allclose(D, D.T, rtol=0, atol=1e-12 * scale):
        raise InvalidInputError(f"{name} is not symmetric")
    if np.any(np.abs(np.diag(D)) > 1e-12 * scale):
        raise InvalidInputError(f"{name} has a non-zero diagonal")
    return D
