"""Monte Carlo clustering experiments on simulated scenarios.

Each trial simulates a scenario, builds the FL, JS and QA matrices once and
the CQA matrices once per radius, then clusters for every fuzziness value.
CQA picks its radius per ``m`` by the Xie-Beni index.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .clustering import ClusterConfig, HyperGrid, run_multistart, select_hyperparameters
from .dissimilarity import METRIC_KINDS, cqa_matrices, pairwise_matrix
from .evaluation import FuzzinessCurve, arif, aufc, cutoff_success, jif
from .simulation import SCENARIO_LAGS, build_scenario, scenario, scenario_from_dict

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_R_GRID",
    "ExperimentSettings",
    "cluster_trial",
    "run_accuracy_experiment",
    "run_cutoff_experiment",
]

# radii near pi make every arc almost the full circle and fool the Xie-Beni index
DEFAULT_R_GRID = tuple(float(r) for r in np.round(np.arange(1, 21) * 0.1, 10))


@dataclass(frozen=True)
class ExperimentSettings:
    """Parameters shared by every trial of an experiment."""

    scenario_id: int = 2
    T: int = None
    wrap: str = "eta1"
    m_values: tuple = (1.2,)
    metrics: tuple = METRIC_KINDS
    trials: int = 50
    restarts: int = 50
    max_iter: int = 100
    lags: tuple = None
    levels: tuple = (0.1, 0.5, 0.9)
    r_grid: tuple = DEFAULT_R_GRID
    cutoff: float = 0.7
    seed: int = 0
    n_jobs: int = 1
    scenario_config: dict = None

    def resolved_lags(self):
        if self.lags:
            return tuple(self.lags)
        if self.scenario_config is not None:
            return tuple(self.scenario_config.get("lags", (1,)))
        return SCENARIO_LAGS[int(self.scenario_id)]

    def spec(self):
        if self.scenario_config is not None:
            cfg = dict(self.scenario_config)
            if self.T is not None:
                cfg["T"] = self.T
            return scenario_from_dict(cfg)
        return scenario(self.scenario_id, T=self.T, wrap=self.wrap)

    def to_dict(self):
        out = dict(self.__dict__)
        out["lags"] = list(self.resolved_lags())
        out["T"] = self.spec().T
        for k in ("m_values", "metrics", "levels", "r_grid"):
            out[k] = list(out[k])
        return out


def cluster_trial(dataset, C, m_values, metrics, lags, levels, r_grid, restarts, max_iter, seed):
    """Cluster one dataset with every metric and fuzziness value.

    Returns
    -------
    dict
        ``{metric: [(FuzzyPartition, radius or None), ...]}`` in ``m_values``
        order.
    """
    out = {}
    for kind in metrics:
        kind = kind.upper()
        if kind == "CQA":
            mats = cqa_matrices(dataset, lags, levels, r_grid)
            res = []
            for m in m_values:
                sel = select_hyperparameters(
                    grid=HyperGrid((C,), (m,), tuple(mats)),
                    restarts=restarts,
                    max_iter=max_iter,
                    seed=seed,
                    matrices=mats,
                )
                res.append((sel.partition, sel.r))
            out[kind] = res
        else:
            params = {"lags": lags, "levels": levels}
            D = pairwise_matrix(dataset, kind, params)
            out[kind] = [
                (run_multistart(D, ClusterConfig(C, float(m), max_iter, restarts, seed)), None) for m in m_values
            ]
    return out


def _trial_seeds(seed, trials):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(trials)]


def _run_trials(settings, C, score):
    spec = settings.spec()
    lags = settings.resolved_lags()

    def one(trial_seed):
        dataset, truth = build_scenario(spec, trial_seed)
        res = cluster_trial(
            dataset, C, settings.m_values, settings.metrics, lags, settings.levels,
            settings.r_grid, settings.restarts, settings.max_iter, trial_seed,
        )
        return {k: [score(part, truth) + (r,) for part, r in v] for k, v in res.items()}

    seeds = _trial_seeds(settings.seed, settings.trials)
    if settings.n_jobs == 1:
        return [one(s) for s in seeds]
    return Parallel(n_jobs=settings.n_jobs)(delayed(one)(s) for s in seeds)


@dataclass(frozen=True, eq=False)
class AccuracyResult:
    """Per-trial ARIF and JIF values, shape ``(trials, len(m_values))`` per metric."""

    settings: ExperimentSettings
    arif: dict
    jif: dict
    radii: list = field(default_factory=list)

    def mean_arif(self, metric):
        return self.arif[metric].mean(axis=0)

    def mean_jif(self, metric):
        return self.jif[metric].mean(axis=0)

    def table(self):
        """Rows ``(m, metric, mean ARIF, mean JIF)``."""
        rows = []
        for j, m in enumerate(self.settings.m_values):
            for kind in self.arif:
                rows.append((m, kind, float(self.arif[kind][:, j].mean()), float(self.jif[kind][:, j].mean())))
        return rows


def run_accuracy_experiment(settings):
    """ARIF/JIF of every metric over repeated scenario simulations (three-group scenarios)."""
    spec = settings.spec()
    if spec.isolated is not None:
        raise ValueError("accuracy experiments need a scenario without an isolated series")
    C = len(spec.clusters)
    per_trial = _run_trials(settings, C, lambda part, truth: (arif(part.memberships, truth), jif(part.memberships, truth)))
    kinds = [k.upper() for k in settings.metrics]
    A = {k: np.array([[v[0] for v in t[k]] for t in per_trial]) for k in kinds}
    J = {k: np.array([[v[1] for v in t[k]] for t in per_trial]) for k in kinds}
    radii = [[v[2] for v in t["CQA"]] for t in per_trial] if "CQA" in kinds else []
    return AccuracyResult(settings, A, J, radii)


@dataclass(frozen=True, eq=False)
class CutoffResult:
    """Success indicators, shape ``(trials, len(m_values))`` per metric."""

    settings: ExperimentSettings
    success: dict

    def curve(self, metric):
        return FuzzinessCurve(np.asarray(self.settings.m_values), self.success[metric].mean(axis=0))

    def summary(self):
        """``{metric: {"maximum": ..., "aufc": ...}}``."""
        out = {}
        for kind in self.success:
            c = self.curve(kind)
            out[kind] = {"maximum": c.maximum, "aufc": aufc(c) if c.m_values.size > 1 else None}
        return out


def run_cutoff_experiment(settings):
    """Correct-classification rates with one isolated series (two-group scenarios)."""
    spec = settings.spec()
    if spec.isolated is None or len(spec.clusters) != 2:
        raise ValueError("cutoff experiments need two groups and one isolated series")
    per_trial = _run_trials(settings, 2, lambda part, truth: (cutoff_success(part.memberships, truth, settings.cutoff),))
    kinds = [k.upper() for k in settings.metrics]
    S = {k: np.array([[v[0] for v in t[k]] for t in per_trial], dtype=float) for k in kinds}
    return CutoffResult(settings, S)
