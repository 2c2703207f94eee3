"""Simulation of real-valued processes wrapped onto the circle.

Generators cover ARMA, quantile autoregressive (QAR), GARCH and Gaussian
white noise. Two wrapping links map the real line to the circle:
``eta1(x) = x mod 2*pi`` and ``eta2(x) = 2*arctan(x) + pi``.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtri

from ._validation import TWO_PI, check_real_series
from .dependence import cqa_features_grid, circular_acf_features
from .dissimilarity import d_fl, d_js
from .exceptions import InvalidSpecError

__all__ = [
    "DEFAULT_BURN_IN",
    "GeneratorSpec",
    "ScenarioSpec",
    "gen_arma",
    "gen_qar",
    "gen_garch",
    "gen_white_noise",
    "generate",
    "wrap",
    "scenario",
    "SCENARIO_LAGS",
    "build_scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "load_scenario",
    "write_dataset_csv",
    "read_dataset_csv",
    "motivating_example",
    "MOTIVATING_PROCESSES",
]

DEFAULT_BURN_IN = 500
FAMILIES = ("ARMA", "QAR", "GARCH", "WN")


@dataclass(frozen=True)
class GeneratorSpec:
    """Process family and its coefficients.

    Only the fields of the chosen family are read:

    * ``ARMA``: ``ar`` (alpha_1..alpha_p) and ``ma`` (beta_1..beta_q);
    * ``QAR``: ``slopes`` and ``offsets``, lag ``i`` using
      ``f_i(u) = slopes[i] * (u - offsets[i])``; the intercept function is the
      standard normal quantile function;
    * ``GARCH``: ``alpha0``, ``alpha`` (on lagged squares) and ``beta`` (on
      lagged variances);
    * ``WN``: standard normal noise.
    """

    family: str
    ar: tuple = ()
    ma: tuple = ()
    slopes: tuple = ()
    offsets: tuple = ()
    alpha0: float = 0.0
    alpha: tuple = ()
    beta: tuple = ()
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        for name in ("ar", "ma", "slopes", "offsets", "alpha", "beta"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if fam not in FAMILIES:
            raise InvalidSpecError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.burn_in < 0:
            raise InvalidSpecError("burn_in must be non-negative")
        if fam == "ARMA" and any(self.ar):
            # AR polynomial 1 - a1 z - ... - ap z^p must have all roots outside the unit disc
            roots = np.roots(np.r_[-np.asarray(self.ar)[::-1], 1.0])
            if np.any(np.abs(roots) <= 1.0):
                raise InvalidSpecError(f"AR coefficients {self.ar} are not stationary")
        if fam == "QAR" and len(self.slopes) != len(self.offsets):
            raise InvalidSpecError("QAR slopes and offsets must have equal length")
        if fam == "GARCH":
            if not self.alpha0 > 0:
                raise InvalidSpecError("GARCH alpha0 must be positive")
            if any(v < 0 for v in self.alpha + self.beta):
                raise InvalidSpecError("GARCH alpha and beta must be non-negative")
            if sum(self.alpha) + sum(self.beta) >= 1:
                raise InvalidSpecError("GARCH requires sum(alpha) + sum(beta) < 1")

    @classmethod
    def arma(cls, ar=(), ma=(), **kw):
        return cls("ARMA", ar=ar, ma=ma, **kw)

    @classmethod
    def qar(cls, slopes, offsets, **kw):
        return cls("QAR", slopes=slopes, offsets=offsets, **kw)

    @classmethod
    def garch(cls, alpha0, alpha=(), beta=(), **kw):
        return cls("GARCH", alpha0=alpha0, alpha=alpha, beta=beta, **kw)

    @classmethod
    def white_noise(cls, **kw):
        return cls("WN", **kw)

    def to_dict(self):
        keys = {
            "ARMA": ("ar", "ma"),
            "QAR": ("slopes", "offsets"),
            "GARCH": ("alpha0", "alpha", "beta"),
            "WN": (),
        }[self.family]
        out = {"family": self.family}
        for k in keys:
            v = getattr(self, k)
            out[k] = list(v) if isinstance(v, tuple) else v
        if self.burn_in != DEFAULT_BURN_IN:
            out["burn_in"] = self.burn_in
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.pop("count", None)
        return cls(**data)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_length(T):
    if int(T) != T or T < 1:
        raise InvalidSpecError(f"series length must be a positive integer, got {T!r}")
    return int(T)


def gen_arma(spec, T, seed=None):
    """ARMA recursion driven by standard normal innovations, started at zero."""
    if spec.family != "ARMA":
        raise InvalidSpecError("gen_arma needs an ARMA spec")
    T = _check_length(T)
    eps = _rng(seed).standard_normal(T + spec.burn_in)
    x = lfilter(np.r_[1.0, spec.ma], np.r_[1.0, -np.asarray(spec.ar)], eps)
    return x[spec.burn_in :]


def _qar_recursion(u, slopes, offsets):
    p = len(slopes)
    base = ndtri(u)
    x = np.zeros(u.size + p)
    for t in range(u.size):
        ut = u[t]
        acc = base[t]
        for i in range(p):
            acc += slopes[i] * (ut - offsets[i]) * x[p + t - 1 - i]
        x[p + t] = acc
    return x[p:]


def gen_qar(spec, T, seed=None):
    """QAR recursion ``X_t = Phi^{-1}(U_t) + sum_i f_i(U_t) X_{t-i}``, started at zero."""
    if spec.family != "QAR":
        raise InvalidSpecError("gen_qar needs a QAR spec")
    T = _check_length(T)
    u = _rng(seed).random(T + spec.burn_in)
    return _qar_recursion(u, spec.slopes, spec.offsets)[spec.burn_in :]


def gen_garch(spec, T, seed=None):
    """GARCH recursion with the variance started at its unconditional value."""
    if spec.family != "GARCH":
        raise InvalidSpecError("gen_garch needs a GARCH spec")
    T = _check_length(T)
    n = T + spec.burn_in
    eps = _rng(seed).standard_normal(n)
    a, b = spec.alpha, spec.beta
    p, q = len(a), len(b)
    uncond = spec.alpha0 / (1.0 - sum(a) - sum(b))
    lag = max(p, q, 1)
    x2 = np.full(n + lag, uncond)
    s2 = np.full(n + lag, uncond)
    x = np.empty(n)
    for t in range(n):
        k = t + lag
        var = spec.alpha0
        for i in range(p):
            var += a[i] * x2[k - 1 - i]
        for j in range(q):
            var += b[j] * s2[k - 1 - j]
        s2[k] = var
        x[t] = math.sqrt(var) * eps[t]
        x2[k] = x[t] * x[t]
    return x[spec.burn_in :]


def gen_white_noise(spec, T, seed=None):
    T = _check_length(T)
    return _rng(seed).standard_normal(T)


_GENERATORS = {"ARMA": gen_arma, "QAR": gen_qar, "GARCH": gen_garch, "WN": gen_white_noise}


def generate(spec, T, seed=None):
    """Dispatch to the generator of ``spec.family``."""
    return _GENERATORS[spec.family](spec, T, seed)


def wrap(series, transform="eta1"):
    """Map a real series onto ``[0, 2*pi)``.

    ``"eta1"`` reduces modulo ``2*pi``; ``"eta2"`` applies
    ``2*arctan(x) + pi``, a monotone map of the line onto ``(0, 2*pi)``.
    """
    x = check_real_series(series)
    t = str(transform).lower()
    if t in ("eta1", "1", "mod"):
        out = np.mod(x, TWO_PI)
        out[out >= TWO_PI] = 0.0
        return out
    if t in ("eta2", "2", "arctan"):
        return 2.0 * np.arctan(x) + np.pi
    raise InvalidSpecError(f"unknown wrapping transform {transform!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Clustering scenario: groups of series from common generators.

    ``clusters`` pairs each generator with its number of series; scenarios
    with an ambiguous member carry it as ``isolated``.
    """

    id: object
    clusters: tuple
    T: int = 500
    wrap: str = "eta1"
    isolated: GeneratorSpec = None

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple((g, int(k)) for g, k in self.clusters))
        if not self.clusters:
            raise InvalidSpecError("a scenario needs at least one cluster")
        if any(k < 1 for _, k in self.clusters):
            raise InvalidSpecError("series counts must be positive")
        _check_length(self.T)
        if str(self.wrap).lower() not in ("eta1", "eta2"):
            raise InvalidSpecError(f"wrap must be 'eta1' or 'eta2', got {self.wrap!r}")

    @property
    def n_series(self):
        return sum(k for _, k in self.clusters) + (self.isolated is not None)

    @property
    def labels(self):
        out = [c for c, (_, k) in enumerate(self.clusters) for _ in range(k)]
        if self.isolated is not None:
            out.append(-1)
        return np.asarray(out, dtype=int)


_ARMA = {
    1: ((0.2, -0.2, 0.2), (0.0, 0.0, 0.0)),
    2: ((-0.2, 0.2, -0.2), (0.0, 0.0, 0.0)),
    3: ((0.0, 0.0, 0.0), (0.2, -0.2, 0.2)),
}
_QAR = {
    1: ((0.2, 1.2), (0.4, 0.4)),
    2: ((-0.2, -1.2), (0.6, 0.6)),
    3: ((0.0, 0.0), (0.0, 0.0)),
}
_GARCH = {
    1: (0.1, (0.4, 0.4), (0.05, 0.05)),
    2: (0.1, (0.05, 0.05), (0.4, 0.4)),
    3: (0.1, (0.05, 0.4), (0.4, 0.05)),
}
_GARCH_ISOLATED = (0.1, (0.225, 0.225), (0.225, 0.225))

SCENARIO_LAGS = {1: (1, 2, 3), 2: (1, 2), 3: (1, 2), 4: (1, 2, 3), 5: (1, 2), 6: (1, 2)}
_DEFAULT_LENGTH = {1: 500, 2: 500, 3: 1000, 4: 500, 5: 500, 6: 1000}


def _group(scenario_family, k):
    if scenario_family == 1:
        ar, ma = _ARMA[k]
        return GeneratorSpec.arma(ar, ma)
    if scenario_family == 2:
        slopes, offsets = _QAR[k]
        return GeneratorSpec.qar(slopes, offsets)
    a0, a, b = _GARCH[k]
    return GeneratorSpec.garch(a0, a, b)


def scenario(sid, T=None, wrap="eta1", per_cluster=5):
    """Built-in scenario ``1``..``6``.

    Scenarios 1-3 hold three groups of ``per_cluster`` series (ARMA, QAR and
    GARCH generators). Scenarios 4-6 take the first two groups of scenarios
    1-3 and add one isolated series: white noise for 4 and 5, a GARCH(2, 2)
    with all lag coefficients 0.225 for 6.
    """
    sid = int(sid)
    if sid not in _DEFAULT_LENGTH:
        raise InvalidSpecError(f"scenario id must be 1..6, got {sid}")
    T = _DEFAULT_LENGTH[sid] if T is None else T
    if sid <= 3:
        groups = tuple((_group(sid, k), per_cluster) for k in (1, 2, 3))
        return ScenarioSpec(sid, groups, T=T, wrap=wrap)
    base = sid - 3
    groups = tuple((_group(base, k), per_cluster) for k in (1, 2))
    if sid == 6:
        a0, a, b = _GARCH_ISOLATED
        isolated = GeneratorSpec.garch(a0, a, b)
    else:
        isolated = GeneratorSpec.white_noise()
    return ScenarioSpec(sid, groups, T=T, wrap=wrap, isolated=isolated)


def build_scenario(spec, seed=None):
    """Simulate a scenario.

    Returns
    -------
    dataset : list of ndarray
        Wrapped series, grouped in cluster order, isolated series last.
    labels : ndarray of int
        Group index per series; ``-1`` marks the isolated series.
    """
    gens = [g for g, k in spec.clusters for _ in range(k)]
    if spec.isolated is not None:
        gens.append(spec.isolated)
    children = np.random.SeedSequence(seed).spawn(len(gens))
    dataset = [wrap(generate(g, spec.T, np.random.default_rng(s)), spec.wrap) for g, s in zip(gens, children)]
    return dataset, spec.labels


def scenario_to_dict(spec):
    out = {
        "id": spec.id,
        "T": spec.T,
        "wrap": spec.wrap,
        "clusters": [dict(g.to_dict(), count=k) for g, k in spec.clusters],
    }
    if spec.isolated is not None:
        out["isolated"] = spec.isolated.to_dict()
    return out


def scenario_from_dict(data):
    """Build a :class:`ScenarioSpec` from its JSON-style dictionary."""
    try:
        clusters = tuple((GeneratorSpec.from_dict(c), c.get("count", 5)) for c in data["clusters"])
        isolated = data.get("isolated")
        return ScenarioSpec(
            data.get("id", "custom"),
            clusters,
            T=data.get("T", 500),
            wrap=data.get("wrap", "eta1"),
            isolated=None if isolated is None else GeneratorSpec.from_dict(isolated),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidSpecError(f"malformed scenario config: {exc}") from exc


def load_scenario(path):
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def write_dataset_csv(path, dataset, labels=None):
    """One series per row: label first, then the angles."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for i, s in enumerate(dataset):
            lab = "" if labels is None else ("none" if labels[i] == -1 else labels[i])
            w.writerow([lab] + [repr(float(v)) for v in s])


def read_dataset_csv(path):
    dataset, labels = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            labels.append(row[0])
            dataset.append(np.array([float(v) for v in row[1:]]))
    return dataset, labels


MOTIVATING_PROCESSES = (
    GeneratorSpec.qar((0.2, 1.2), (0.5, 0.5)),
    GeneratorSpec.qar((-0.2, -1.2), (0.5, 0.5)),
)


def _summarise(values):
    v = 100.0 * np.asarray(values)
    return {
        "mean": float(v.mean()),
        "sd": float(v.std(ddof=1)) if v.size > 1 else 0.0,
        "q05": float(np.quantile(v, 0.05)),
        "q95": float(np.quantile(v, 0.95)),
    }


def motivating_example(T=5000, replicates=1000, r_grid=None, seed=0, lags=(1, 2), levels=(0.1, 0.5, 0.9)):
    """Distances between realisations of two uncorrelated QAR(2) processes.

    For every replicate a pair of series (one per process, wrapped with
    ``eta1``) is simulated and the CQA distance over ``r_grid`` as well as
    the Fisher-Lee and Jammalamadaka-Sarma distances are computed.

    Returns
    -------
    list of dict
        One row per radius for ``"CQA"`` followed by ``"FL"`` and ``"JS"``
        rows; each holds ``mean``, ``sd``, ``q05`` and ``q95`` of the
        distances multiplied by 100.
    """
    if r_grid is None:
        r_grid = np.round(np.arange(1, 32) * 0.1, 10)
    r_grid = [float(r) for r in r_grid]
    if replicates < 1:
        raise InvalidSpecError("replicates must be positive")
    cqa_vals = np.empty((replicates, len(r_grid)))
    fl_vals = np.empty(replicates)
    js_vals = np.empty(replicates)
    streams = np.random.SeedSequence(seed).spawn(replicates)
    for k, ss in enumerate(streams):
        s1, s2 = ss.spawn(2)
        x1 = wrap(gen_qar(MOTIVATING_PROCESSES[0], T, np.random.default_rng(s1)))
        x2 = wrap(gen_qar(MOTIVATING_PROCESSES[1], T, np.random.default_rng(s2)))
        f1 = cqa_features_grid(x1, lags, levels, r_grid)
        f2 = cqa_features_grid(x2, lags, levels, r_grid)
        cqa_vals[k] = [np.mean((a.values - b.values) ** 2) / 4.0 for a, b in zip(f1, f2)]
        fl_vals[k] = d_fl(circular_acf_features(x1, lags, "FL"), circular_acf_features(x2, lags, "FL"))
        js_vals[k] = d_js(circular_acf_features(x1, lags, "JS"), circular_acf_features(x2, lags, "JS"))
    rows = [dict(distance="CQA", r=r, **_summarise(cqa_vals[:, j])) for j, r in enumerate(r_grid)]
    rows.append(dict(distance="FL", r=None, **_summarise(fl_vals)))
    rows.append(dict(distance="JS", r=None, **_summarise(js_vals)))
    return rows
