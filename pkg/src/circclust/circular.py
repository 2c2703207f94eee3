"""Basic circular statistics: angle reduction, median, quantiles and arcs.

Angles are radians in ``[0, 2*pi)``. A circular series is represented as a
plain 1-D float array; :func:`~circclust._validation.check_circular_series`
reduces finite inputs into range.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import TWO_PI, check_circular_series, check_level, check_radius
from .exceptions import InvalidInputError

__all__ = [
    "Arc",
    "normalize_angle",
    "circular_distance",
    "circular_mean",
    "circular_median",
    "circular_quantile",
    "circular_quantiles",
    "arc_from_center",
    "arc_from_quantile",
    "arc_contains",
]


def normalize_angle(x):
    """Reduce a real angle in radians to ``[0, 2*pi)``.

    Parameters
    ----------
    x : float

    Returns
    -------
    float
    """
    x = float(x)
    if not math.isfinite(x):
        raise InvalidInputError(f"angle must be finite, got {x!r}")
    out = x % TWO_PI
    return 0.0 if out >= TWO_PI else out


def circular_distance(a, b):
    """Geodesic distance on the unit circle, in ``[0, pi]``."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI))
    return np.minimum(d, TWO_PI - d)


def circular_mean(series):
    """Mean direction ``atan2(sum sin, sum cos)`` reduced to ``[0, 2*pi)``."""
    x = check_circular_series(series)
    return normalize_angle(math.atan2(np.sin(x).sum(), np.cos(x).sum()))


def _mean_deviation_at_data(sorted_angles):
    """Total circular deviation sum_i d(theta_i, c) for every data point c.

    Works on the sorted sample doubled by a full turn, so each candidate
    needs two prefix-sum lookups instead of a pass over the data.
    """
    a = sorted_angles
    n = a.size
    b = np.concatenate([a, a + TWO_PI])
    prefix = np.concatenate([[0.0], np.cumsum(b)])
    k = np.arange(n)
    # b[k:j] lies in [c, c + pi]; b[j:k+n] lies in (c + pi, c + 2*pi]
    j = np.searchsorted(b, a + np.pi, side="right")
    near = (prefix[j] - prefix[k]) - (j - k) * a
    far = (k + n - j) * (TWO_PI + a) - (prefix[k + n] - prefix[j])
    return near + far


def circular_median(series):
    """Sample circular median.

    The minimiser of the mean circular deviation
    ``sum_i (pi - |pi - |theta_i - mu||) / T`` over the observed angles.
    The deviation is piecewise linear in ``mu`` with convex kinks only at
    data points, so restricting candidates to the sample loses nothing.
    Near-ties (relative ``1e-12``) resolve to the smallest angle.

    Parameters
    ----------
    series : array-like of float

    Returns
    -------
    float
    """
    x = np.sort(check_circular_series(series))
    total = _mean_deviation_at_data(x)
    best = total.min()
    tol = 1e-12 * max(1.0, abs(best)) + 1e-12 * x.size
    return float(x[np.flatnonzero(total <= best + tol)[0]])


def _unwrapped_sorted(x, median):
    lower = median - np.pi
    return np.sort(lower + np.mod(x - lower, TWO_PI))


def _order_index(p, n):
    # type-1 empirical quantile: ceil(p*n)-th order statistic, p = 0 -> first
    k = math.ceil(p * n - 1e-9)
    return min(max(k, 1), n) - 1


def circular_quantiles(series, levels, median=None):
    """Circular quantiles for several levels sharing one median computation.

    Returns
    -------
    ndarray of float, shape (len(levels),)
    """
    x = check_circular_series(series)
    levels = [check_level(float(p)) for p in np.atleast_1d(levels)]
    mu = circular_median(x) if median is None else float(median)
    u = _unwrapped_sorted(x, mu)
    vals = np.array([u[_order_index(p, u.size)] for p in levels])
    vals = np.mod(vals, TWO_PI)
    vals[vals >= TWO_PI] = 0.0
    return vals


def circular_quantile(series, p):
    """Empirical circular quantile of level ``p``.

    The sample is unwrapped into ``[mu - pi, mu + pi)`` around the circular
    median ``mu``, the ``ceil(p*T)``-th order statistic is taken and the
    result is reduced back to ``[0, 2*pi)``. ``p = 0`` and ``p = 1`` give the
    two ends of the unwrapped sample.
    """
    return float(circular_quantiles(series, [p])[0])


@dataclass(frozen=True)
class Arc:
    """Closed arc of the unit circle.

    Attributes
    ----------
    center : float
        Angle in ``[0, 2*pi)``.
    radius : float
        Half-width in ``[0, pi)``.
    wraps : bool
        True when ``center - radius <= 0`` or ``center + radius >= 2*pi``,
        i.e. when the arc is written as the complement of an interval.
    """

    center: float
    radius: float
    wraps: bool

    @property
    def bounds(self):
        """``(psi1, psi2)``: the sorted arc endpoints reduced mod ``2*pi``."""
        lo = (self.center - self.radius) % TWO_PI
        hi = (self.center + self.radius) % TWO_PI
        return min(lo, hi), max(lo, hi)


def arc_from_center(center, w):
    """Build the arc of radius ``w`` around an arbitrary angle."""
    c = normalize_angle(center)
    w = check_radius(w)
    wraps = not ((c - w) > 0 and (c + w) < TWO_PI)
    return Arc(center=c, radius=w, wraps=wraps)


def arc_from_quantile(series, p, w):
    """Arc of radius ``w`` centred on the level-``p`` circular quantile."""
    w = check_radius(w)
    return arc_from_center(circular_quantile(series, p), w)


def arc_contains(arc, theta):
    """Membership test for one angle or an array of angles.

    Non-wrapping arcs are the closed interval ``[psi1, psi2]``; wrapping arcs
    are the closed complement of ``(psi1, psi2)``. An arc whose lower end
    sits exactly on zero (``center == radius``) does not actually cross the
    origin and is treated as the interval ``[0, 2*radius]``.
    """
    theta = np.asarray(theta, dtype=float)
    psi1, psi2 = arc.bounds
    if arc.wraps and arc.center - arc.radius != 0.0:
        inside = ~((psi1 < theta) & (theta < psi2))
    else:
        inside = (psi1 <= theta) & (theta <= psi2)
    return bool(inside) if inside.ndim == 0 else inside
