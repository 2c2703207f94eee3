"""Fuzzy C-medoids clustering on a precomputed dissimilarity matrix.

The alternating scheme updates memberships in closed form and then picks, for
each cluster, the dataset member minimising the membership-weighted total
distance. Medoid-set equality stops the iteration.

Also here: the multi-start wrapper, the Xie-Beni validity index, the
permutation test used to choose the lag set and the (C, m, r) grid search.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_dataset, check_lags, check_levels, check_radius, check_square_matrix
from .dissimilarity import METRIC_KINDS, DissimilarityMatrix, cqa_matrices, pairwise_matrix
from .exceptions import InvalidConfigError

logger = logging.getLogger(__name__)

__all__ = [
    "ClusterConfig",
    "FuzzyPartition",
    "HyperGrid",
    "HyperSelection",
    "update_memberships",
    "update_medoids",
    "fuzzy_objective",
    "run_fcmedoids",
    "run_multistart",
    "restart_seeds",
    "xie_beni",
    "select_lags",
    "select_hyperparameters",
    "FuzzyCMedoids",
]


@dataclass(frozen=True)
class ClusterConfig:
    """Settings of one fuzzy C-medoids run (or batch of restarts)."""

    C: int = 2
    m: float = 1.5
    max_iter: int = 100
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if int(self.C) != self.C or self.C < 2:
            raise InvalidConfigError(f"C must be an integer >= 2, got {self.C!r}")
        if not (math.isfinite(self.m) and self.m > 1):
            raise InvalidConfigError(f"fuzziness m must be > 1, got {self.m!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 0:
            raise InvalidConfigError(f"max_iter must be a non-negative integer, got {self.max_iter!r}")
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise InvalidConfigError(f"restarts must be a positive integer, got {self.restarts!r}")


@dataclass(frozen=True, eq=False)
class FuzzyPartition:
    """Result of a fuzzy C-medoids run.

    Attributes
    ----------
    memberships : ndarray, shape (n, C)
        Row-stochastic membership matrix.
    medoids : tuple of int
        Dataset indices of the cluster prototypes, one per column.
    objective : float
        ``sum_i sum_c u_ic**m * D[i, medoid_c]`` at the returned solution.
    iterations : int
    converged : bool
        True when the medoid set repeated before ``max_iter``.
    objective_path : tuple of float
        Objective after every membership update, in order.
    """

    memberships: np.ndarray
    medoids: tuple
    objective: float
    iterations: int
    converged: bool
    objective_path: tuple = ()
    m: float = float("nan")

    @property
    def labels(self):
        return np.argmax(self.memberships, axis=1)

    def to_dict(self, config=None):
        out = {
            "memberships": self.memberships.tolist(),
            "medoids": [int(j) for j in self.medoids],
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        if config is not None:
            out["config"] = dict(config.__dict__)
        return out


def _as_matrix(D):
    if isinstance(D, DissimilarityMatrix):
        return D.values
    return check_square_matrix(D)


def _memberships_from_distances(dist, m):
    U = np.zeros_like(dist)
    zero = dist <= 0.0
    hard = zero.any(axis=1)
    U[np.flatnonzero(hard), np.argmax(zero[hard], axis=1)] = 1.0
    soft = ~hard
    if soft.any():
        logits = -np.log(dist[soft]) / (m - 1.0)
        logits -= logits.max(axis=1, keepdims=True)
        w = np.exp(logits)
        U[soft] = w / w.sum(axis=1, keepdims=True)
    return U


def update_memberships(D, medoids, m):
    """Closed-form membership update for fixed medoids.

    ``u_ic = 1 / sum_c' (d_ic / d_ic') ** (1 / (m - 1))``, evaluated in log
    space so that ``m`` close to 1 does not overflow. A row with a zero
    distance is assigned wholly to the first such cluster.

    Parameters
    ----------
    D : array-like, shape (n, n)
    medoids : sequence of int
    m : float

    Returns
    -------
    ndarray, shape (n, len(medoids))
    """
    return _memberships_from_distances(_as_matrix(D)[:, list(medoids)], m)


def _medoids_from_cost(cost):
    picks = np.argmin(cost, axis=1)
    if len(set(picks.tolist())) == picks.size:
        return tuple(int(j) for j in picks)
    rows, cols = linear_sum_assignment(cost)
    out = np.empty(cost.shape[0], dtype=int)
    out[rows] = cols
    return tuple(int(j) for j in out)


def update_medoids(D, U, m):
    """Medoid update: ``argmin_j sum_i u_ic**m * D[i, j]`` for each cluster.

    Ties go to the smallest index. If two clusters land on the same index the
    clusters are instead given the distinct indices of least total cost (an
    assignment problem), which keeps the objective non-increasing.
    """
    return _medoids_from_cost((np.asarray(U, dtype=float) ** m).T @ _as_matrix(D))


def fuzzy_objective(D, U, medoids, m):
    D = _as_matrix(D)
    return float(np.sum((np.asarray(U) ** m) * D[:, list(medoids)]))


def run_fcmedoids(D, config, rng=None, initial_medoids=None):
    """Single fuzzy C-medoids run from random (or given) initial medoids.

    Parameters
    ----------
    D : array-like or DissimilarityMatrix, shape (n, n)
    config : ClusterConfig
    rng : numpy.random.Generator, optional
        Source of the initial medoids; defaults to ``default_rng(config.seed)``.
    initial_medoids : sequence of int, optional

    Returns
    -------
    FuzzyPartition
    """
    D = _as_matrix(D)
    n = D.shape[0]
    C, m = config.C, config.m
    if n <= C:
        raise InvalidConfigError(f"need more series than clusters (n={n}, C={C})")
    if initial_medoids is None:
        rng = np.random.default_rng(config.seed) if rng is None else rng
        medoids = tuple(int(j) for j in rng.choice(n, size=C, replace=False))
    else:
        medoids = tuple(int(j) for j in initial_medoids)
        if len(set(medoids)) != C or not all(0 <= j < n for j in medoids):
            raise InvalidConfigError(f"initial medoids must be {C} distinct indices in 0..{n - 1}")

    def objective(U, medoids):
        return float(np.sum(U**m * D[:, list(medoids)]))

    U = _memberships_from_distances(D[:, list(medoids)], m)
    path = [objective(U, medoids)]
    converged = False
    iterations = 0
    while iterations < config.max_iter:
        new = _medoids_from_cost((U**m).T @ D)
        iterations += 1
        if set(new) == set(medoids):
            converged = True
            break
        medoids = new
        U = _memberships_from_distances(D[:, list(medoids)], m)
        path.append(objective(U, medoids))
    return FuzzyPartition(
        memberships=U,
        medoids=medoids,
        objective=path[-1],
        iterations=iterations,
        converged=converged,
        objective_path=tuple(path),
        m=m,
    )


def restart_seeds(seed, restarts):
    """Independent per-restart generators spawned from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(restarts)]


def _batch_memberships(dist, m):
    # dist: (R, n, C); same rule as _memberships_from_distances, per restart
    zero = dist <= 0.0
    hard = zero.any(axis=2)
    with np.errstate(divide="ignore"):
        logits = -np.log(dist) / (m - 1.0)
    logits[hard] = 0.0
    logits -= logits.max(axis=2, keepdims=True)
    U = np.exp(logits)
    U /= U.sum(axis=2, keepdims=True)
    if hard.any():
        r, i = np.nonzero(hard)
        U[r, i] = 0.0
        U[r, i, np.argmax(zero[r, i], axis=1)] = 1.0
    return U


def _batch_objectives(D, starts, m, max_iter):
    """Final objectives of fuzzy C-medoids runs from every row of ``starts``."""
    med = starts.copy()
    R = med.shape[0]
    active = np.ones(R, dtype=bool)
    obj = np.empty(R)
    for _ in range(max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        dist = np.transpose(D[:, med[idx]], (1, 0, 2))
        W = _batch_memberships(dist, m) ** m
        obj[idx] = np.einsum("rnc,rnc->r", W, dist)
        cost = np.einsum("rnc,nj->rcj", W, D)
        new = np.argmin(cost, axis=2)
        srt = np.sort(new, axis=1)
        for k in np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1)):
            new[k] = _medoids_from_cost(cost[k])
        same = (np.sort(new, axis=1) == np.sort(med[idx], axis=1)).all(axis=1)
        active[idx[same]] = False
        med[idx[~same]] = new[~same]
    return obj


def run_multistart(D, config):
    """Best-objective partition over ``config.restarts`` random starts.

    Restarts draw from generators spawned off ``config.seed``, so the result
    does not depend on the order they are run in; ties keep the earliest.
    All starts are iterated together and the winner is then replayed by
    :func:`run_fcmedoids`.
    """
    D = _as_matrix(D)
    n, C = D.shape[0], config.C
    if n <= C:
        raise InvalidConfigError(f"need more series than clusters (n={n}, C={C})")
    starts = np.array([rng.choice(n, size=C, replace=False) for rng in restart_seeds(config.seed, config.restarts)])
    if config.restarts == 1:
        return run_fcmedoids(D, config, initial_medoids=starts[0])
    obj = _batch_objectives(D, starts, config.m, config.max_iter)
    return run_fcmedoids(D, config, initial_medoids=starts[int(np.argmin(obj))])


def xie_beni(D, U, medoids, m):
    """Xie-Beni index for a medoid-based fuzzy partition.

    ``sum_i sum_c u_ic**m d(i, medoid_c) / (n * min_{c != c'} d(medoid_c, medoid_c'))``.
    Distances enter unsquared since the dissimilarities are already squared
    feature differences. Returns ``inf`` when two medoids coincide.
    """
    D = _as_matrix(D)
    U = np.asarray(U, dtype=float)
    medoids = list(medoids)
    sep = D[np.ix_(medoids, medoids)]
    sep = sep[~np.eye(len(medoids), dtype=bool)].min()
    if sep <= 0:
        return math.inf
    return fuzzy_objective(D, U, medoids, m) / (U.shape[0] * sep)


def _js_deviations(x):
    mean = math.atan2(np.sin(x).sum(), np.cos(x).sum())
    return np.sin(x - mean)


def _js_acf_rows(S, lag):
    """JS autocorrelation of each row of sine deviations (vectorised)."""
    a, b = S[:, :-lag], S[:, lag:]
    num = np.einsum("ij,ij->i", a, b)
    den = np.sqrt(np.einsum("ij,ij->i", a, a) * np.einsum("ij,ij->i", b, b))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, 0.0)


def select_lags(dataset, max_lag, alpha=0.05, n_permutations=200, seed=0):
    """Choose the lag set by per-series permutation tests on the JS autocorrelation.

    For every series and lag ``l <= max_lag`` the observed ``|rho_JS(l)|`` is
    compared with its distribution over random shuffles of the series. A lag
    enters the set when more than half of the series reject independence at
    level ``alpha``. Falls back to ``(1,)`` if no lag qualifies.

    Returns
    -------
    tuple of int
    """
    series = check_dataset(dataset)
    if max_lag < 1:
        raise InvalidConfigError("max_lag must be >= 1")
    shortest = min(s.size for s in series)
    if max_lag > shortest - 2:
        raise InvalidConfigError(f"max_lag {max_lag} too large for series of length {shortest}")
    rng = np.random.default_rng(seed)
    rejections = np.zeros(max_lag, dtype=int)
    for x in series:
        s = _js_deviations(x)
        perms = rng.permuted(np.tile(s, (n_permutations, 1)), axis=1)
        for lag in range(1, max_lag + 1):
            observed = abs(_js_acf_rows(s[None, :], lag)[0])
            null = np.abs(_js_acf_rows(perms, lag))
            pval = (1 + np.count_nonzero(null >= observed - 1e-12)) / (n_permutations + 1)
            rejections[lag - 1] += pval <= alpha
    chosen = tuple(l + 1 for l in range(max_lag) if rejections[l] / len(series) > 0.5)
    return chosen or (1,)


@dataclass(frozen=True)
class HyperGrid:
    """Candidate values for the number of clusters, fuzziness and radius."""

    C_values: tuple = (2,)
    m_values: tuple = (1.5,)
    r_values: tuple = (0.7,)

    def __post_init__(self):
        if not (self.C_values and self.m_values and self.r_values):
            raise InvalidConfigError("every grid axis needs at least one value")
        for C in self.C_values:
            if int(C) != C or C < 2:
                raise InvalidConfigError(f"grid C value {C!r} must be an integer >= 2")
        for m in self.m_values:
            if not m > 1:
                raise InvalidConfigError(f"grid m value {m!r} must exceed 1")
        for r in self.r_values:
            check_radius(r)


@dataclass(frozen=True, eq=False)
class HyperSelection:
    C: int
    m: float
    r: float
    partition: FuzzyPartition
    xie_beni: float
    scores: list = field(default_factory=list)


def select_hyperparameters(
    dataset=None,
    grid=HyperGrid(),
    lags=(1,),
    levels=(0.1, 0.5, 0.9),
    restarts=10,
    max_iter=100,
    seed=0,
    matrices=None,
):
    """Grid search over ``(C, m, r)`` minimising the Xie-Beni index.

    Parameters
    ----------
    dataset : sequence of array-like, optional
        Circular series. May be omitted when ``matrices`` is given.
    grid : HyperGrid
    lags, levels : sequences
        Fixed CQA lags and probability levels.
    restarts, max_iter, seed : int
        Passed to :func:`run_multistart` for every grid point.
    matrices : dict, optional
        Precomputed ``{r: DissimilarityMatrix}`` covering ``grid.r_values``.

    Returns
    -------
    HyperSelection
        The winning tuple (ties resolved by grid order ``C``, ``m``, ``r``),
        its partition and the score of every grid point.
    """
    if matrices is None:
        matrices = cqa_matrices(dataset, check_lags(lags), check_levels(levels), grid.r_values)
    best = None
    scores = []
    for C, m, r in itertools.product(grid.C_values, grid.m_values, grid.r_values):
        D = matrices[r]
        config = ClusterConfig(C=int(C), m=float(m), max_iter=max_iter, restarts=restarts, seed=seed)
        part = run_multistart(D, config)
        xb = xie_beni(D, part.memberships, part.medoids, m)
        scores.append({"C": int(C), "m": float(m), "r": float(r), "xie_beni": xb, "objective": part.objective})
        if best is None or xb < best.xie_beni:
            best = HyperSelection(int(C), float(m), float(r), part, xb)
    logger.debug("selected C=%s m=%s r=%s (XB=%.4g)", best.C, best.m, best.r, best.xie_beni)
    return HyperSelection(best.C, best.m, best.r, best.partition, best.xie_beni, scores)


class FuzzyCMedoids(ClusterMixin, BaseEstimator):
    """Fuzzy C-medoids clustering, sklearn style.

    Parameters
    ----------
    n_clusters : int, default=2
    m : float, default=1.5
        Fuzziness exponent, > 1.
    metric : {"precomputed", "CQA", "FL", "JS", "QA"}, default="CQA"
        With ``"precomputed"`` ``fit`` takes an ``(n, n)`` dissimilarity
        matrix; otherwise a sequence of circular series.
    metric_params : dict, optional
        ``lags``, ``levels`` and ``radius`` forwarded to :func:`pairwise_matrix`.
    n_init : int, default=10
        Number of random medoid initialisations.
    max_iter : int, default=100
    random_state : int, default=0

    Attributes
    ----------
    memberships_ : ndarray, shape (n, n_clusters)
    medoid_indices_ : ndarray of int
    labels_ : ndarray of int
        Cluster of maximum membership.
    objective_ : float
    n_iter_ : int
    dissimilarity_ : DissimilarityMatrix or ndarray
    """

    def __init__(
        self,
        n_clusters=2,
        m=1.5,
        metric="CQA",
        metric_params=None,
        n_init=10,
        max_iter=100,
        random_state=0,
    ):
        self.n_clusters = n_clusters
        self.m = m
        self.metric = metric
        self.metric_params = metric_params
        self.n_init = n_init
        self.max_iter = max_iter
        self.random_state = random_state

    def _config(self):
        seed = 0 if self.random_state is None else int(self.random_state)
        return ClusterConfig(self.n_clusters, self.m, self.max_iter, self.n_init, seed)

    def fit(self, X, y=None):
        config = self._config()
        metric = str(self.metric).upper()
        if metric == "PRECOMPUTED":
            D = _as_matrix(X)
            self.dissimilarity_ = D
        elif metric in METRIC_KINDS:
            self._train_series = check_dataset(X)
            self.dissimilarity_ = pairwise_matrix(self._train_series, metric, self.metric_params)
            D = self.dissimilarity_.values
        else:
            raise InvalidConfigError(f"unknown metric {self.metric!r}")
        part = run_multistart(D, config)
        self.partition_ = part
        self.memberships_ = part.memberships
        self.medoid_indices_ = np.asarray(part.medoids)
        self.labels_ = part.labels
        self.objective_ = part.objective
        self.n_iter_ = part.iterations
        return self

    def predict_memberships(self, X):
        """Memberships of new data with respect to the fitted medoids.

        For ``metric="precomputed"`` ``X`` holds distances from the new
        items to the training items, shape ``(n_new, n_train)``.
        """
        check_is_fitted(self, "medoid_indices_")
        metric = str(self.metric).upper()
        if metric == "PRECOMPUTED":
            dist = np.asarray(X, dtype=float)[:, self.medoid_indices_]
        else:
            new = check_dataset(X)
            medoids = [self._train_series[j] for j in self.medoid_indices_]
            D = pairwise_matrix(medoids + new, metric, self.metric_params).values
            dist = D[len(medoids):, : len(medoids)]
        return _memberships_from_distances(dist, self.m)

    def predict(self, X):
        return np.argmax(self.predict_memberships(X), axis=1)
