"""Serial-dependence features of circular (and real-valued) series.

Three families are provided:

* circular quantile autocorrelations (CQA): correlations between the
  indicators ``I(theta_t in A_tau)`` and ``I(theta_{t+l} in A_tau')`` where
  ``A_p`` is the arc of radius ``r`` around the level-``p`` circular quantile;
* the Fisher-Lee and Jammalamadaka-Sarma circular autocorrelations;
* quantile autocovariances (QA) that treat the values as points on the line.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    check_circular_series,
    check_dataset,
    check_lag,
    check_lags,
    check_level,
    check_levels,
    check_radius,
    check_real_series,
)
from .circular import arc_contains, arc_from_center, circular_median, circular_quantiles
from .exceptions import InvalidLagError

__all__ = [
    "CQAFeatures",
    "QAFeatures",
    "CircularAcfFeatures",
    "arc_indicator_prob",
    "joint_arc_indicator_prob",
    "cqa",
    "cqa_features",
    "cqa_features_grid",
    "rho_fl",
    "rho_js",
    "circular_acf_features",
    "qa",
    "qa_features",
    "CQAFeatureExtractor",
]


@dataclass(frozen=True, eq=False)
class CQAFeatures:
    """CQA values indexed ``(lag, level, level)`` for one series."""

    values: np.ndarray
    lags: tuple
    levels: tuple
    radius: float

    def __post_init__(self):
        expected = (len(self.lags), len(self.levels), len(self.levels))
        if self.values.shape != expected:
            raise ValueError(f"values has shape {self.values.shape}, expected {expected}")


@dataclass(frozen=True, eq=False)
class QAFeatures:
    """Quantile autocovariances indexed ``(lag, level, level)``."""

    values: np.ndarray
    lags: tuple
    levels: tuple


@dataclass(frozen=True, eq=False)
class CircularAcfFeatures:
    """Circular autocorrelations at each lag; ``kind`` is ``"FL"`` or ``"JS"``."""

    values: np.ndarray
    lags: tuple
    kind: str


def _arc_indicators(x, levels, radius, median=None):
    """Boolean matrix ``(len(levels), T)`` of arc memberships."""
    centers = circular_quantiles(x, levels, median=median)
    return np.vstack([arc_contains(arc_from_center(c, radius), x) for c in centers])


def _correlate_indicators(ind, lags):
    """CQA tensor from precomputed indicator rows.

    Marginal frequencies use all ``T`` points and joint frequencies the
    ``T - l`` aligned pairs. Cells whose marginal frequency is 0 or 1 have
    no defined correlation and are set to 0; the remaining cells are clipped
    to ``[-1, 1]`` because the mixed ``1/T`` and ``1/(T-l)`` normalisations
    can push short-series estimates marginally outside that range.
    """
    T = ind.shape[1]
    f = ind.astype(float)
    prob = f.mean(axis=1)
    spread = prob * (1.0 - prob)
    denom = np.sqrt(np.outer(spread, spread))
    out = np.empty((len(lags), ind.shape[0], ind.shape[0]))
    for k, lag in enumerate(lags):
        joint = f[:, : T - lag] @ f[:, lag:].T / (T - lag)
        gamma = joint - np.outer(prob, prob)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = np.where(denom > 0, gamma / denom, 0.0)
        out[k] = np.clip(rho, -1.0, 1.0)
    return out


def arc_indicator_prob(series, p, w):
    """Fraction of observations inside the arc of radius ``w`` at quantile ``p``."""
    x = check_circular_series(series)
    check_level(p)
    w = check_radius(w)
    return float(_arc_indicators(x, [p], w)[0].mean())


def joint_arc_indicator_prob(series, p, p2, w, lag):
    """Fraction of pairs ``(theta_i, theta_{i+lag})`` falling in both arcs."""
    x = check_circular_series(series)
    lag = check_lag(lag, x.size)
    check_level(p)
    check_level(p2)
    w = check_radius(w)
    ind = _arc_indicators(x, [p, p2], w)
    return float(np.mean(ind[0, : x.size - lag] & ind[1, lag:]))


def cqa(series, tau, tau2, lag, r):
    """Circular quantile autocorrelation of lag ``lag`` and radius ``r``.

    Parameters
    ----------
    series : array-like of float
        Angles in radians.
    tau, tau2 : float
        Probability levels of the arcs for ``theta_t`` and ``theta_{t+lag}``.
    lag : int
        ``1 <= lag < T``.
    r : float
        Arc radius in ``[0, pi)``.

    Returns
    -------
    float
        Value in ``[-1, 1]``; 0 when either arc holds none or all of the data.
    """
    x = check_circular_series(series)
    lag = check_lag(lag, x.size)
    tau, tau2 = check_level(tau), check_level(tau2)
    r = check_radius(r)
    ind = _arc_indicators(x, [tau, tau2], r)
    return float(_correlate_indicators(ind, [lag])[0, 0, 1])


def cqa_features(series, lags=(1,), levels=(0.1, 0.5, 0.9), r=0.7):
    """Full CQA tensor for one series; arcs are built once per level."""
    return cqa_features_grid(series, lags, levels, [r])[0]


def cqa_features_grid(series, lags, levels, radii):
    """CQA tensors for several radii; quantiles are computed once."""
    x = check_circular_series(series)
    lags = check_lags(lags)
    for lag in lags:
        check_lag(lag, x.size)
    levels = check_levels(levels)
    radii = [check_radius(r) for r in np.atleast_1d(radii)]
    mu = circular_median(x)
    out = []
    for r in radii:
        ind = _arc_indicators(x, levels, r, median=mu)
        out.append(CQAFeatures(_correlate_indicators(ind, lags), lags, levels, r))
    return out


def _check_acf_lag(lag, n):
    lag = check_lag(lag, n)
    if n - lag < 2:
        raise InvalidLagError(f"lag {lag} leaves fewer than two pairs in a series of length {n}")
    return lag


def rho_fl(series, lag):
    """Fisher-Lee circular autocorrelation at ``lag``.

    The pairwise double sum over ``i < j`` of
    ``sin(theta_i - theta_j) * sin(theta_{i+l} - theta_{j+l})`` collapses to
    ``S_ss * C_cc - S_sc * S_cs`` built from single sums of products of sines
    and cosines, so the cost is linear in ``T``.
    Returns 0 when either normalising factor vanishes.
    """
    x = check_circular_series(series)
    lag = _check_acf_lag(lag, x.size)
    a, b = x[: x.size - lag], x[lag:]
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)

    def pair_sum(s1, c1, s2, c2):
        return (s1 @ s2) * (c1 @ c2) - (s1 @ c2) * (c1 @ s2)

    num = pair_sum(sa, ca, sb, cb)
    den_a = pair_sum(sa, ca, sa, ca)
    den_b = pair_sum(sb, cb, sb, cb)
    # cancellation leaves O(eps) residue for constant series
    if den_a <= 1e-12 * (sa @ sa) * (ca @ ca) or den_b <= 1e-12 * (sb @ sb) * (cb @ cb):
        return 0.0
    return float(np.clip(num / math.sqrt(den_a * den_b), -1.0, 1.0))


def rho_js(series, lag):
    """Jammalamadaka-Sarma circular autocorrelation at ``lag``.

    The mean direction is taken over the whole series. Returns 0 when the
    sine deviations from the mean direction vanish.
    """
    x = check_circular_series(series)
    lag = _check_acf_lag(lag, x.size)
    mean = math.atan2(np.sin(x).sum(), np.cos(x).sum())
    s = np.sin(x - mean)
    a, b = s[: x.size - lag], s[lag:]
    saa, sbb = a @ a, b @ b
    tiny = 1e-20 * x.size
    if saa <= tiny or sbb <= tiny:
        return 0.0
    return float(np.clip((a @ b) / math.sqrt(saa * sbb), -1.0, 1.0))


def circular_acf_features(series, lags, kind="JS"):
    """Vector of FL or JS autocorrelations over ``lags``."""
    kind = kind.upper()
    fn = {"FL": rho_fl, "JS": rho_js}.get(kind)
    if fn is None:
        raise ValueError(f"kind must be 'FL' or 'JS', got {kind!r}")
    x = check_circular_series(series)
    lags = check_lags(lags)
    return CircularAcfFeatures(np.array([fn(x, l) for l in lags]), lags, kind)


def _real_quantile(sorted_y, p):
    n = sorted_y.size
    k = math.ceil(p * n - 1e-9)
    return sorted_y[min(max(k, 1), n) - 1]


def _qa_tensor(y, lags, levels):
    ys = np.sort(y)
    ind = np.vstack([y <= _real_quantile(ys, t) for t in levels]).astype(float)
    T = y.size
    prob = ind.mean(axis=1)
    out = np.empty((len(lags), len(levels), len(levels)))
    for k, lag in enumerate(lags):
        joint = ind[:, : T - lag] @ ind[:, lag:].T / (T - lag)
        out[k] = joint - np.outer(prob, prob)
    return out


def qa(series, tau, tau2, lag):
    """Quantile autocovariance of a real-valued series (type-1 quantiles)."""
    y = check_real_series(series)
    lag = check_lag(lag, y.size)
    return float(_qa_tensor(y, [lag], [check_level(tau), check_level(tau2)])[0, 0, 1])


def qa_features(series, lags=(1,), levels=(0.1, 0.5, 0.9)):
    y = check_real_series(series)
    lags = check_lags(lags)
    for lag in lags:
        check_lag(lag, y.size)
    levels = check_levels(levels)
    return QAFeatures(_qa_tensor(y, lags, levels), lags, levels)


class CQAFeatureExtractor(TransformerMixin, BaseEstimator):
    """Map circular series to flattened CQA feature vectors.

    Series may have different lengths. ``transform`` returns an array of
    shape ``(n_series, len(lags) * len(levels) ** 2)``. A quarter of the mean
    squared difference between two rows is their CQA dissimilarity.

    Parameters
    ----------
    lags : sequence of int, default=(1,)
    levels : sequence of float, default=(0.1, 0.5, 0.9)
    radius : float, default=0.7
    """

    def __init__(self, lags=(1,), levels=(0.1, 0.5, 0.9), radius=0.7):
        self.lags = lags
        self.levels = levels
        self.radius = radius

    def fit(self, X, y=None):
        check_dataset(X)
        self.lags_ = check_lags(self.lags)
        self.levels_ = check_levels(self.levels)
        self.radius_ = check_radius(self.radius)
        self.n_features_out_ = len(self.lags_) * len(self.levels_) ** 2
        return self

    def transform(self, X):
        check_is_fitted(self, "lags_")
        series = check_dataset(X)
        return np.vstack(
            [cqa_features(s, self.lags_, self.levels_, self.radius_).values.ravel() for s in series]
        )
