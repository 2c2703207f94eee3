"""External validation of fuzzy partitions against a hard ground truth."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import InvalidInputError

__all__ = [
    "ISOLATED",
    "FuzzinessCurve",
    "as_labels",
    "pair_agreement_sums",
    "arif",
    "jif",
    "cutoff_success",
    "aufc",
    "default_m_grid",
]

# label used for a series that belongs to no ground-truth group
ISOLATED = -1


def as_labels(truth):
    """Integer label array; ``None`` and ``"none"`` become :data:`ISOLATED`."""
    out = []
    for lab in truth:
        if lab is None or (isinstance(lab, str) and lab.lower() == "none"):
            out.append(ISOLATED)
        else:
            out.append(int(lab))
    return np.asarray(out, dtype=int)


def _one_hot(labels):
    _, idx = np.unique(labels, return_inverse=True)
    H = np.zeros((labels.size, idx.max() + 1))
    H[np.arange(labels.size), idx] = 1.0
    return H


def _same_and_different(U):
    """Pairwise same-cluster and different-cluster strengths (min t-norm, max s-norm)."""
    pair_min = np.minimum(U[:, None, :, None], U[None, :, None, :])
    C = U.shape[1]
    diag = np.eye(C, dtype=bool)
    same = pair_min[:, :, diag].max(axis=-1)
    if C > 1:
        diff = pair_min[:, :, ~diag].max(axis=-1)
    else:
        diff = np.zeros_like(same)
    return same, diff


def pair_agreement_sums(U, truth):
    """Fuzzy pair-counting sums ``(a, b, c, d)`` over unordered pairs.

    ``a``: same cluster in both, ``b``: same in ``U`` only, ``c``: same in the
    truth only, ``d``: different in both; conjunction is ``min``.
    """
    U = np.asarray(U, dtype=float)
    labels = as_labels(truth)
    if U.ndim != 2 or U.shape[0] != labels.size:
        raise InvalidInputError(
            f"membership matrix has {U.shape[0] if U.ndim == 2 else '?'} rows, truth has {labels.size}"
        )
    if np.any(labels == ISOLATED):
        raise InvalidInputError("ARIF/JIF need every series labelled; found isolated series")
    su, du = _same_and_different(U)
    sr, dr = _same_and_different(_one_hot(labels))
    iu = np.triu_indices(labels.size, k=1)
    su, du, sr, dr = su[iu], du[iu], sr[iu], dr[iu]
    return (
        float(np.minimum(su, sr).sum()),
        float(np.minimum(su, dr).sum()),
        float(np.minimum(du, sr).sum()),
        float(np.minimum(du, dr).sum()),
    )


def arif(U, truth):
    """Fuzzy adjusted Rand index between memberships ``U`` and hard labels.

    Equals the classical adjusted Rand index when ``U`` is crisp.

    Parameters
    ----------
    U : array-like, shape (n, C)
    truth : sequence of labels, length n

    Returns
    -------
    float
        Value in ``[-1, 1]``.
    """
    a, b, c, d = pair_agreement_sums(U, truth)
    total = a + b + c + d
    expected = (a + b) * (a + c) / total
    denom = 0.5 * ((a + b) + (a + c)) - expected
    if denom == 0:
        return 1.0 if b == 0 and c == 0 else 0.0
    return (a - expected) / denom


def jif(U, truth):
    """Fuzzy Jaccard index ``a / (a + b + c)``, in ``[0, 1]``."""
    a, b, c, _ = pair_agreement_sums(U, truth)
    denom = a + b + c
    return a / denom if denom > 0 else 0.0


def cutoff_success(U, truth, cutoff=0.7):
    """Whether a two-cluster partition recovers two groups plus one isolated series.

    Success means every member of one group has membership above ``cutoff``
    in one cluster, every member of the other group above ``cutoff`` in the
    other cluster, and the isolated series stays below ``cutoff`` in both.
    """
    U = np.asarray(U, dtype=float)
    labels = as_labels(truth)
    if U.ndim != 2 or U.shape != (labels.size, 2):
        raise InvalidInputError(f"expected memberships of shape ({labels.size}, 2), got {U.shape}")
    groups = [g for g in np.unique(labels) if g != ISOLATED]
    if len(groups) != 2 or np.count_nonzero(labels == ISOLATED) != 1:
        raise InvalidInputError("truth must hold exactly two groups and one isolated series")
    first, second = (labels == groups[0]), (labels == groups[1])
    iso = labels == ISOLATED
    if not np.all(U[iso] < cutoff):
        return False
    for c in (0, 1):
        if np.all(U[first, c] > cutoff) and np.all(U[second, 1 - c] > cutoff):
            return True
    return False


@dataclass(frozen=True, eq=False)
class FuzzinessCurve:
    """Correct-classification rate as a function of the fuzziness exponent."""

    m_values: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m_values, dtype=float)
        r = np.asarray(self.rates, dtype=float)
        if m.shape != r.shape or m.ndim != 1:
            raise InvalidInputError("m_values and rates must be 1-D of equal length")
        if np.any(np.diff(m) <= 0):
            raise InvalidInputError("m_values must be strictly increasing")
        if np.any((r < 0) | (r > 1)):
            raise InvalidInputError("rates must lie in [0, 1]")
        object.__setattr__(self, "m_values", m)
        object.__setattr__(self, "rates", r)

    @property
    def maximum(self):
        return float(self.rates.max())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "rate"])
            for m, r in zip(self.m_values, self.rates):
                w.writerow([f"{m:.6g}", f"{r:.6g}"])


def aufc(curve):
    """Area under the fuzziness curve (trapezoidal rule)."""
    if curve.m_values.size < 2:
        raise InvalidInputError("AUFC needs at least two grid points")
    return float(trapezoid(curve.rates, curve.m_values))


def default_m_grid(step=0.1, upper=4.0):
    """Equally spaced fuzziness values ``1 + step, ..., upper``."""
    n = int(round((upper - 1.0) / step))
    return np.round(1.0 + step * np.arange(1, n + 1), 10)
