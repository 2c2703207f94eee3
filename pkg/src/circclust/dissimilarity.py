"""Feature-based dissimilarities between series and pairwise matrix assembly.

Every distance here is a quarter of the mean squared difference between two
feature vectors: CQA tensors (``"CQA"``), Fisher-Lee or Jammalamadaka-Sarma
autocorrelations (``"FL"``, ``"JS"``) or quantile autocovariances (``"QA"``).
Features are length-normalised, so series of different lengths compare
directly.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ._validation import check_dataset, check_lags, check_levels, check_radius, check_square_matrix
from .dependence import (
    CircularAcfFeatures,
    CQAFeatures,
    QAFeatures,
    circular_acf_features,
    cqa_features,
    cqa_features_grid,
    qa_features,
)
from .exceptions import IncompatibleFeaturesError, InvalidInputError

__all__ = [
    "METRIC_KINDS",
    "DissimilarityMatrix",
    "d_cqa",
    "d_fl",
    "d_js",
    "d_qa",
    "pairwise_matrix",
    "cqa_matrices",
]

METRIC_KINDS = ("CQA", "FL", "JS", "QA")


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    """Dense symmetric distance matrix tagged with the metric that built it."""

    values: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        check_square_matrix(self.values)
        if self.kind not in METRIC_KINDS:
            raise InvalidInputError(f"unknown metric kind {self.kind!r}")

    @property
    def n(self):
        return self.values.shape[0]

    def to_csv(self, path):
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")

    def to_dict(self):
        return {
            "kind": self.kind,
            "params": {k: list(v) if isinstance(v, tuple) else v for k, v in self.params.items()},
            "values": self.values.tolist(),
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def from_dict(cls, data):
        params = {k: tuple(v) if isinstance(v, list) else v for k, v in data.get("params", {}).items()}
        return cls(np.asarray(data["values"], dtype=float), data["kind"], params)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_csv(cls, path, kind, params=None):
        values = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))
        return cls(values, kind, dict(params or {}))


def _squared_mean_distance(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.mean((a - b) ** 2) / 4.0)


def d_cqa(a, b):
    """CQA dissimilarity, in ``[0, 1]``."""
    if not isinstance(a, CQAFeatures) or not isinstance(b, CQAFeatures):
        raise IncompatibleFeaturesError("d_cqa expects two CQAFeatures")
    if a.lags != b.lags or a.levels != b.levels or a.radius != b.radius:
        raise IncompatibleFeaturesError(
            f"CQA features differ in parameters: {(a.lags, a.levels, a.radius)} "
            f"vs {(b.lags, b.levels, b.radius)}"
        )
    return _squared_mean_distance(a.values, b.values)


def _acf_distance(a, b, kind):
    for f in (a, b):
        if not isinstance(f, CircularAcfFeatures) or f.kind != kind:
            raise IncompatibleFeaturesError(f"expected {kind} autocorrelation features")
    if a.lags != b.lags:
        raise IncompatibleFeaturesError(f"lags differ: {a.lags} vs {b.lags}")
    return _squared_mean_distance(a.values, b.values)


def d_fl(a, b):
    """Distance between Fisher-Lee autocorrelation vectors, in ``[0, 1]``."""
    return _acf_distance(a, b, "FL")


def d_js(a, b):
    """Distance between Jammalamadaka-Sarma autocorrelation vectors, in ``[0, 1]``."""
    return _acf_distance(a, b, "JS")


def d_qa(a, b):
    """Distance between quantile-autocovariance tensors, at most ``1/16``."""
    if not isinstance(a, QAFeatures) or not isinstance(b, QAFeatures):
        raise IncompatibleFeaturesError("d_qa expects two QAFeatures")
    if a.lags != b.lags or a.levels != b.levels:
        raise IncompatibleFeaturesError("QA features differ in lags or levels")
    return _squared_mean_distance(a.values, b.values)


def _normalize_params(kind, params):
    params = dict(params or {})
    out = {"lags": check_lags(params.get("lags", (1,)))}
    if kind in ("CQA", "QA"):
        out["levels"] = check_levels(params.get("levels", (0.1, 0.5, 0.9)))
    if kind == "CQA":
        out["radius"] = check_radius(params.get("radius", 0.7))
    return out


def _extract(kind, series, params):
    if kind == "CQA":
        return cqa_features(series, params["lags"], params["levels"], params["radius"])
    if kind == "QA":
        return qa_features(series, params["lags"], params["levels"])
    return circular_acf_features(series, params["lags"], kind)


def _matrix_from_features(rows, kind, params):
    F = np.vstack([np.ravel(r) for r in rows])
    if F.shape[0] == 1:
        values = np.zeros((1, 1))
    else:
        values = squareform(pdist(F, "sqeuclidean")) / (4.0 * F.shape[1])
    return DissimilarityMatrix(values, kind, params)


def pairwise_matrix(dataset, kind="CQA", params=None):
    """Pairwise dissimilarities over a dataset of series.

    Parameters
    ----------
    dataset : sequence of array-like
        Series in radians; lengths may differ.
    kind : {"CQA", "FL", "JS", "QA"}
    params : dict, optional
        ``lags`` for every kind, ``levels`` for CQA and QA, ``radius`` for CQA.

    Returns
    -------
    DissimilarityMatrix
    """
    kind = kind.upper()
    if kind not in METRIC_KINDS:
        raise InvalidInputError(f"kind must be one of {METRIC_KINDS}, got {kind!r}")
    params = _normalize_params(kind, params)
    series = check_dataset(dataset)
    rows = []
    for i, s in enumerate(series):
        try:
            rows.append(_extract(kind, s, params).values)
        except InvalidInputError as exc:
            raise type(exc)(f"series {i}: {exc}") from exc
    return _matrix_from_features(rows, kind, params)


def cqa_matrices(dataset, lags, levels, radii):
    """CQA matrices for several radii, computing quantiles once per series.

    Returns
    -------
    dict
        Maps each radius to its :class:`DissimilarityMatrix`.
    """
    series = check_dataset(dataset)
    lags, levels = check_lags(lags), check_levels(levels)
    radii = [check_radius(r) for r in radii]
    per_series = []
    for i, s in enumerate(series):
        try:
            per_series.append(cqa_features_grid(s, lags, levels, radii))
        except InvalidInputError as exc:
            raise type(exc)(f"series {i}: {exc}") from exc
    return {
        r: _matrix_from_features(
            [feats[k].values for feats in per_series],
            "CQA",
            {"lags": lags, "levels": levels, "radius": r},
        )
        for k, r in enumerate(radii)
    }
