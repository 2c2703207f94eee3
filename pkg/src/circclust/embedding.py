"""Metric two-dimensional scaling of a dissimilarity matrix.

Coordinates start from classical (Torgerson) scaling and are refined by
SMACOF majorisation, which never increases the stress.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.base import BaseEstimator

from ._validation import check_square_matrix
from .exceptions import InvalidInputError

__all__ = ["Embedding2D", "stress", "classical_scaling", "mds_2d", "TwoDimensionalScaling"]


@dataclass(frozen=True, eq=False)
class Embedding2D:
    """Planar configuration and its fit statistics.

    ``r_squared`` is ``1 - stress**2``.
    """

    points: np.ndarray
    stress: float
    r_squared: float
    iterations: int
    stress_path: tuple = ()

    def to_csv(self, path, labels=None):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "a", "b", "label"])
            for i, (a, b) in enumerate(self.points):
                lab = "" if labels is None else labels[i]
                w.writerow([i, f"{a:.10g}", f"{b:.10g}", lab])


def stress(D, points):
    """Normalised stress of a configuration.

    ``sqrt(sum_{i != j} (||p_i - p_j|| - D_ij)**2 / sum_{i != j} D_ij**2)``.
    Returns 0 for an all-zero ``D`` matched by coincident points and
    ``inf`` for an all-zero ``D`` with distinct points.
    """
    D = np.asarray(getattr(D, "values", D), dtype=float)
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] != D.shape[0]:
        raise InvalidInputError(f"points of shape {points.shape} do not match D of shape {D.shape}")
    fitted = squareform(pdist(points)) if points.shape[0] > 1 else np.zeros((1, 1))
    num = float(np.sum((fitted - D) ** 2))
    den = float(np.sum(D**2))
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return math.sqrt(num / den)


def classical_scaling(D, n_components=2):
    """Torgerson scaling; missing dimensions (non-positive eigenvalues) are zero."""
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D**2) @ J
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:n_components]
    evals, evecs = evals[order], evecs[:, order]
    scale = np.sqrt(np.clip(evals, 0.0, None))
    X = np.zeros((n, n_components))
    X[:, : scale.size] = evecs * scale
    return X


def _guttman(D, X):
    dist = squareform(pdist(X))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dist > 0, D / dist, 0.0)
    B = -ratio
    B[np.diag_indices_from(B)] = ratio.sum(axis=1)
    return B @ X / D.shape[0]


def mds_2d(D, seed=0, max_iter=300, tol=1e-9):
    """Two-dimensional metric scaling by stress majorisation.

    Parameters
    ----------
    D : array-like or DissimilarityMatrix, shape (n, n)
        Symmetric with zero diagonal, ``n >= 3``.
    seed : int
        Only used to nudge a fully collapsed start off the origin.
    max_iter : int
    tol : float
        Stop once the relative stress decrease falls below ``tol``.

    Returns
    -------
    Embedding2D
    """
    D = check_square_matrix(D)
    n = D.shape[0]
    if n < 3:
        raise InvalidInputError(f"two-dimensional scaling needs at least 3 items, got {n}")
    if not np.any(D > 0):
        return Embedding2D(np.zeros((n, 2)), 0.0, 1.0, 0, (0.0,))
    X = classical_scaling(D)
    if np.allclose(X, 0):
        X = np.random.default_rng(seed).normal(scale=1e-3, size=(n, 2))
    path = [stress(D, X)]
    it = 0
    for it in range(1, max_iter + 1):
        X_new = _guttman(D, X)
        s_new = stress(D, X_new)
        if s_new > path[-1]:
            # majorisation cannot increase stress; only rounding does
            it -= 1
            break
        X = X_new
        improvement = path[-1] - s_new
        path.append(s_new)
        if path[-2] == 0 or improvement <= tol * path[-2]:
            break
    # center for reproducible plots
    X = X - X.mean(axis=0)
    final = path[-1]
    return Embedding2D(X, final, 1.0 - final**2, it, tuple(path))


class TwoDimensionalScaling(BaseEstimator):
    """Estimator wrapper around :func:`mds_2d` for precomputed dissimilarities.

    Attributes
    ----------
    embedding_ : ndarray, shape (n, 2)
    stress_ : float
    r_squared_ : float
    n_iter_ : int
    """

    def __init__(self, max_iter=300, tol=1e-9, random_state=0):
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None):
        emb = mds_2d(X, seed=self.random_state or 0, max_iter=self.max_iter, tol=self.tol)
        self.embedding_ = emb.points
        self.stress_ = emb.stress
        self.r_squared_ = emb.r_squared
        self.n_iter_ = emb.iterations
        self.result_ = emb
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_
