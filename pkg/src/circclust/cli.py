"""Command-line entry point: ``circclust {simulate,cluster,mds,motivating}``.

Every command writes its outputs plus a ``manifest.json`` holding the full
resolved configuration; ``--config manifest.json`` replays a run.
"""

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .clustering import ClusterConfig, HyperGrid, run_multistart, select_hyperparameters, select_lags
from .dependence import cqa_features
from .dissimilarity import METRIC_KINDS, pairwise_matrix
from .embedding import mds_2d
from .evaluation import aufc, default_m_grid
from .exceptions import InvalidConfigError
from .experiments import DEFAULT_R_GRID, ExperimentSettings, run_accuracy_experiment, run_cutoff_experiment
from .simulation import build_scenario, motivating_example, read_dataset_csv, scenario
from .wind import SEASONAL_MONTHS, SUMMER_MONTHS, WINTER_MONTHS, ingest_wind_csv, monthly_split

logger = logging.getLogger(__name__)

__all__ = ["RunConfig", "cmd_simulate", "cmd_cluster", "cmd_mds", "cmd_motivating", "main"]

MONTH_FILTERS = {"seasonal": SEASONAL_MONTHS, "winter": WINTER_MONTHS, "summer": SUMMER_MONTHS, "all": None}
CLUSTER_M_GRID = tuple(float(m) for m in np.round(np.arange(11, 21) * 0.1, 10))
ACCURACY_M_GRID = (1.2, 1.4, 1.6, 1.8, 2.0)


@dataclass
class RunConfig:
    """Resolved parameters of one CLI command."""

    command: str = "cluster"
    scenario: str = None
    input: str = None
    input_format: str = "wind"
    station: str = None
    months: str = "seasonal"
    trials: int = 50
    replicates: int = 200
    restarts: int = 50
    max_iter: int = 100
    length: int = None
    per_cluster: int = 5
    wrap: str = "eta1"
    metric: str = "CQA"
    metrics: list = None
    lags: list = None
    levels: list = None
    radius: list = None
    clusters: list = None
    fuzziness: list = None
    cutoff: float = 0.7
    seed: int = 0
    n_jobs: int = 1
    out: str = "out"

    def __post_init__(self):
        if self.command not in ("simulate", "cluster", "mds", "motivating"):
            raise InvalidConfigError(f"unknown command {self.command!r}")
        for name in ("trials", "replicates", "restarts", "per_cluster", "n_jobs"):
            if int(getattr(self, name)) < 1:
                raise InvalidConfigError(f"{name} must be positive")
        if self.length is not None and int(self.length) < 3:
            raise InvalidConfigError("length must be at least 3")
        if not 0 < self.cutoff < 1:
            raise InvalidConfigError("cutoff must lie in (0, 1)")
        if self.months not in MONTH_FILTERS:
            raise InvalidConfigError(f"months must be one of {sorted(MONTH_FILTERS)}")
        if self.input_format not in ("wind", "series"):
            raise InvalidConfigError("input_format must be 'wind' or 'series'")
        if self.metric.upper() not in METRIC_KINDS:
            raise InvalidConfigError(f"metric must be one of {METRIC_KINDS}")
        for m in self.fuzziness or ():
            if not m > 1:
                raise InvalidConfigError(f"fuzziness values must exceed 1, got {m}")
        for c in self.clusters or ():
            if int(c) != c or c < 2:
                raise InvalidConfigError(f"cluster counts must be integers >= 2, got {c}")

    @property
    def level_set(self):
        return tuple(self.levels) if self.levels else (0.1, 0.5, 0.9)

    @classmethod
    def from_file(cls, path, **overrides):
        with open(path) as fh:
            data = json.load(fh)
        data.pop("version", None)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


def _write_manifest(config, extra=None):
    os.makedirs(config.out, exist_ok=True)
    data = dict(asdict(config), version=__version__)
    path = os.path.join(config.out, "manifest.json")
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
    if extra:
        with open(os.path.join(config.out, "summary.json"), "w") as fh:
            json.dump(extra, fh, indent=2, sort_keys=True)
    return path


def _fmt(x):
    return f"{x:.6f}"


def _experiment_settings(config, m_values):
    sc = config.scenario
    if sc is None:
        raise InvalidConfigError("simulate needs --scenario (1..6 or a JSON scenario file)")
    custom = None
    if isinstance(sc, str) and not sc.isdigit():
        with open(sc) as fh:
            custom = json.load(fh)
        sid = custom.get("id", "custom")
    else:
        sid = int(sc)
    return ExperimentSettings(
        scenario_id=sid,
        T=config.length,
        wrap=config.wrap,
        m_values=tuple(m_values),
        metrics=tuple(config.metrics or METRIC_KINDS),
        trials=config.trials,
        restarts=config.restarts,
        max_iter=config.max_iter,
        lags=tuple(config.lags) if config.lags else None,
        levels=config.level_set,
        r_grid=tuple(config.radius) if config.radius else DEFAULT_R_GRID,
        cutoff=config.cutoff,
        seed=config.seed,
        n_jobs=config.n_jobs,
        scenario_config=custom,
    )


def cmd_simulate(config):
    """Monte Carlo clustering experiment on a scenario.

    Three-group scenarios produce ``accuracy.csv`` (rows ``m``, ARIF and JIF
    per metric). Scenarios with an isolated series produce one
    ``curve_<metric>.csv`` per metric and ``summary.json`` with the maximum
    rate and AUFC of each curve.
    """
    probe = _experiment_settings(config, (1.5,))
    isolated = probe.spec().isolated is not None
    m_values = config.fuzziness or (tuple(default_m_grid()) if isolated else ACCURACY_M_GRID)
    settings = _experiment_settings(config, m_values)
    os.makedirs(config.out, exist_ok=True)
    if not isolated:
        res = run_accuracy_experiment(settings)
        kinds = list(res.arif)
        with open(os.path.join(config.out, "accuracy.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m"] + [f"ARIF_{k}" for k in kinds] + [f"JIF_{k}" for k in kinds])
            for j, m in enumerate(settings.m_values):
                w.writerow(
                    [m]
                    + [_fmt(res.arif[k][:, j].mean()) for k in kinds]
                    + [_fmt(res.jif[k][:, j].mean()) for k in kinds]
                )
        summary = {
            "mean_arif": {k: res.mean_arif(k).tolist() for k in kinds},
            "mean_jif": {k: res.mean_jif(k).tolist() for k in kinds},
            "selected_radii": res.radii,
        }
    else:
        res = run_cutoff_experiment(settings)
        summary = {}
        for kind in res.success:
            curve = res.curve(kind)
            curve.to_csv(os.path.join(config.out, f"curve_{kind}.csv"))
            summary[kind] = {
                "maximum": curve.maximum,
                "aufc": aufc(curve) if curve.m_values.size > 1 else None,
            }
    summary["lags"] = list(settings.resolved_lags())
    summary["T"] = settings.spec().T
    _write_manifest(config, summary)
    return summary


def _load_series(config):
    if not config.input:
        raise InvalidConfigError("--input is required")
    if config.input_format == "series":
        dataset, labels = read_dataset_csv(config.input)
        return [str(l) if l != "" else str(i) for i, l in enumerate(labels)], dataset, None
    data = ingest_wind_csv(config.input)
    stations = sorted(data.stations)
    if config.station is None:
        if len(stations) != 1:
            raise InvalidConfigError(f"input holds stations {stations}; choose one with --station")
        station = stations[0]
    elif config.station not in data.stations:
        raise InvalidConfigError(f"station {config.station!r} not in input ({stations})")
    else:
        station = config.station
    pairs = monthly_split(data.stations[station], MONTH_FILTERS[config.months])
    return [p[0] for p in pairs], [p[1] for p in pairs], data.summary()


def cmd_cluster(config):
    """Fuzzy C-medoids clustering of user series with the CQA distance.

    With single values for ``clusters``, ``fuzziness`` and ``radius`` the
    parameters are used as given; otherwise the grid is searched by the
    Xie-Beni index. Missing lags are chosen by the permutation test.

    Writes ``memberships.csv`` (``series, C1, ..., CC, medoid``),
    ``medoids.csv``, ``fingerprint.csv`` (each medoid's CQA tensor) and the
    manifest.
    """
    labels, dataset, ingest = _load_series(config)
    if config.lags:
        lags = tuple(config.lags)
    else:
        shortest = min(s.size for s in dataset)
        lags = select_lags(dataset, max_lag=max(1, min(10, shortest - 2)), seed=config.seed)
    levels = config.level_set
    C_values = tuple(config.clusters or (2,))
    m_values = tuple(config.fuzziness or CLUSTER_M_GRID)
    r_values = tuple(config.radius or DEFAULT_R_GRID)
    n = len(dataset)
    if max(C_values) >= n:
        raise InvalidConfigError(f"need more series than clusters (n={n}, C={max(C_values)})")
    if len(C_values) == len(m_values) == len(r_values) == 1:
        C, m, r = C_values[0], m_values[0], r_values[0]
        D = pairwise_matrix(dataset, "CQA", {"lags": lags, "levels": levels, "radius": r})
        part = run_multistart(D, ClusterConfig(C, m, config.max_iter, config.restarts, config.seed))
        selection = None
    else:
        sel = select_hyperparameters(
            dataset,
            HyperGrid(C_values, m_values, r_values),
            lags=lags,
            levels=levels,
            restarts=config.restarts,
            max_iter=config.max_iter,
            seed=config.seed,
        )
        C, m, r, part = sel.C, sel.m, sel.r, sel.partition
        selection = {"xie_beni": sel.xie_beni, "scores": sel.scores}

    os.makedirs(config.out, exist_ok=True)
    medoid_of = {j: c + 1 for c, j in enumerate(part.medoids)}
    with open(os.path.join(config.out, "memberships.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["series"] + [f"C{c + 1}" for c in range(C)] + ["medoid"])
        for i, lab in enumerate(labels):
            w.writerow([lab] + [f"{u:.4f}" for u in part.memberships[i]] + [medoid_of.get(i, "")])
    with open(os.path.join(config.out, "medoids.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster", "series", "index"])
        for c, j in enumerate(part.medoids):
            w.writerow([f"C{c + 1}", labels[j], j])
    with open(os.path.join(config.out, "fingerprint.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster", "series", "lag", "tau", "tau2", "cqa"])
        for c, j in enumerate(part.medoids):
            feats = cqa_features(dataset[j], lags, levels, r)
            for a, lag in enumerate(feats.lags):
                for b, t1 in enumerate(feats.levels):
                    for k, t2 in enumerate(feats.levels):
                        w.writerow([f"C{c + 1}", labels[j], lag, t1, t2, f"{feats.values[a, b, k]:.6f}"])
    summary = {
        "n_series": n,
        "C": C,
        "m": m,
        "radius": r,
        "lags": list(lags),
        "levels": list(levels),
        "objective": part.objective,
        "medoids": [labels[j] for j in part.medoids],
    }
    if selection is not None:
        summary["selection"] = selection
    if ingest is not None:
        summary["ingestion"] = ingest
    _write_manifest(config, summary)
    return part, labels, summary


def cmd_mds(config):
    """Two-dimensional scaling of a dissimilarity matrix.

    Series come from ``--input`` or from simulating ``--scenario`` with
    ``--per-cluster`` series per group. Writes ``coordinates.csv``
    (``index, a, b, label``) and ``stress.json``.
    """
    metric = config.metric.upper()
    if config.input:
        labels, dataset, _ = _load_series(config)
    elif config.scenario is not None:
        spec = scenario(int(config.scenario), T=config.length, wrap=config.wrap, per_cluster=config.per_cluster)
        dataset, truth = build_scenario(spec, config.seed)
        labels = ["none" if t == -1 else f"C{t + 1}" for t in truth]
    else:
        raise InvalidConfigError("mds needs --input or --scenario")
    params = {"lags": tuple(config.lags or (1,)), "levels": config.level_set}
    if metric == "CQA":
        params["radius"] = (config.radius or [0.7])[0]
    D = pairwise_matrix(dataset, metric, params)
    emb = mds_2d(D, seed=config.seed)
    os.makedirs(config.out, exist_ok=True)
    emb.to_csv(os.path.join(config.out, "coordinates.csv"), labels)
    info = {"stress": emb.stress, "r_squared": emb.r_squared, "iterations": emb.iterations, "metric": metric}
    with open(os.path.join(config.out, "stress.json"), "w") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
    _write_manifest(config)
    return emb, labels


def cmd_motivating(config):
    """Distance distributions for two uncorrelated QAR processes; writes ``distances.csv``."""
    T = config.length or 5000
    r_grid = config.radius or [round(0.1 * k, 10) for k in range(1, 32)]
    rows = motivating_example(T, config.replicates, r_grid, config.seed, tuple(config.lags or (1, 2)), config.level_set)
    os.makedirs(config.out, exist_ok=True)
    with open(os.path.join(config.out, "distances.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["distance", "r", "mean", "sd", "q05", "q95"])
        for row in rows:
            w.writerow([row["distance"], "" if row["r"] is None else row["r"]] + [_fmt(row[k]) for k in ("mean", "sd", "q05", "q95")])
    cqa_rows = [r for r in rows if r["distance"] == "CQA"]
    best = max(cqa_rows, key=lambda r: r["mean"])
    _write_manifest(config, {"best_cqa": best, "baselines": [r for r in rows if r["distance"] != "CQA"]})
    return rows


COMMANDS = {"simulate": cmd_simulate, "cluster": cmd_cluster, "mds": cmd_mds, "motivating": cmd_motivating}


def build_parser():
    parser = argparse.ArgumentParser(prog="circclust", description="Fuzzy clustering of circular time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        p.add_argument("--config", help="JSON run configuration (e.g. a previous manifest.json)")
        p.add_argument("--scenario", help="scenario id 1..6 or JSON scenario file")
        p.add_argument("--input", help="input CSV")
        p.add_argument("--input-format", choices=("wind", "series"))
        p.add_argument("--station")
        p.add_argument("--months", choices=sorted(MONTH_FILTERS))
        p.add_argument("--trials", type=int)
        p.add_argument("--replicates", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--length", type=int)
        p.add_argument("--per-cluster", type=int)
        p.add_argument("--wrap", choices=("eta1", "eta2"))
        p.add_argument("--metric", choices=METRIC_KINDS)
        p.add_argument("--metrics", nargs="+", choices=METRIC_KINDS)
        p.add_argument("--lags", nargs="+", type=int)
        p.add_argument("--levels", nargs="+", type=float)
        p.add_argument("--radius", nargs="+", type=float, help="radius or radius grid")
        p.add_argument("--clusters", nargs="+", type=int, help="number of clusters or grid")
        p.add_argument("--fuzziness", nargs="+", type=float, help="m value or grid")
        p.add_argument("--cutoff", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--n-jobs", type=int)
        p.add_argument("--out")
    return parser


def parse_config(argv=None):
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    path = args.pop("config")
    overrides = {k: v for k, v in args.items() if v is not None}
    if path:
        return RunConfig.from_file(path, command=command, **overrides)
    return RunConfig(command=command, **overrides)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        config = parse_config(argv)
        COMMANDS[config.command](config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote outputs to {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
