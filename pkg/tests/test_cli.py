import csv
import json
import math
import warnings

import numpy as np
import pytest

from circclust.cli import RunConfig, cmd_cluster, cmd_mds, cmd_motivating, cmd_simulate, main, parse_config
from circclust.evaluation import arif
from circclust.exceptions import IngestionError, InvalidConfigError
from circclust.simulation import GeneratorSpec, gen_arma, wrap, write_dataset_csv
from circclust.wind import SEASONAL_MONTHS, WINTER_MONTHS, ingest_wind_csv, month_label, monthly_split


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write_rows(path, rows, header=("station", "timestamp", "direction_deg")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@pytest.fixture
def planted_series(tmp_path):
    """Wrapped AR(1) series with opposite lag-one coefficients."""
    rng = np.random.default_rng(8)
    data, labels = [], []
    for k, phi in enumerate((0.6, -0.6)):
        for _ in range(5):
            data.append(wrap(gen_arma(GeneratorSpec.arma((phi,)), 400, rng), "eta1"))
            labels.append(k)
    path = tmp_path / "series.csv"
    write_dataset_csv(path, data, labels)
    return path, labels


class TestIngestion:
    def test_valid_file(self, tmp_path):
        write_rows(tmp_path / "w.csv", [("A", "2010-01-01T01:00", "90"), ("A", "2010-01-01T00:00", "0")])
        data = ingest_wind_csv(tmp_path / "w.csv")
        recs = data.stations["A"]
        assert [r.direction_deg for r in recs] == [0.0, 90.0]
        assert recs[1].radians == pytest.approx(math.pi / 2)
        assert (data.rows_read, data.rows_accepted, data.rows_rejected) == (2, 2, 0)

    def test_missing_column(self, tmp_path):
        write_rows(tmp_path / "w.csv", [("A", "2010-01-01T00:00")], header=("station", "timestamp"))
        with pytest.raises(IngestionError, match="direction_deg"):
            ingest_wind_csv(tmp_path / "w.csv")

    def test_too_many_invalid_rows(self, tmp_path):
        rows = [("A", f"2010-01-01T{h:02d}:00", "10") for h in range(18)]
        rows += [("A", "not a time", "10"), ("A", "2010-01-02T00:00", "360")]
        write_rows(tmp_path / "w.csv", rows)
        with pytest.raises(IngestionError) as info:
            ingest_wind_csv(tmp_path / "w.csv")
        assert any(e.startswith("line 20") for e in info.value.errors)
        assert any(e.startswith("line 21") for e in info.value.errors)

    def test_few_invalid_rows_tolerated(self, tmp_path):
        rows = [("A", f"2010-01-{d:02d}T00:00", "10") for d in range(1, 31)] + [("A", "2010-02-01T00:00", "abc")]
        write_rows(tmp_path / "w.csv", rows)
        data = ingest_wind_csv(tmp_path / "w.csv")
        assert data.rows_rejected == 1 and data.rows_accepted == 30
        assert "line 32" in data.errors[0]

    def test_duplicate_keeps_later_row(self, tmp_path):
        write_rows(tmp_path / "w.csv", [("A", "2010-01-01T00:00", "10"), ("A", "2010-01-01T00:00", "20")])
        with pytest.warns(UserWarning, match="duplicate"):
            data = ingest_wind_csv(tmp_path / "w.csv")
        assert [r.direction_deg for r in data.stations["A"]] == [20.0]
        assert data.rows_read == data.rows_accepted + data.rows_rejected

    def test_month_label(self):
        assert month_label(2010, 1) == "Jan 10" and month_label(2017, 12) == "Dec 17"


class TestMonthlySplit:
    def test_fixture_counts(self, wind_fixture):
        path, regimes = wind_fixture
        recs = ingest_wind_csv(path).stations["ABHA"]
        seasonal = monthly_split(recs, SEASONAL_MONTHS)
        assert len(seasonal) == len(regimes) == 64
        assert seasonal[0][0] == "Jan 10" and seasonal[-1][0] == "Dec 17"
        assert seasonal[0][1].size == 31 * 24
        assert len(monthly_split(recs)) == 96
        assert len(monthly_split(recs, WINTER_MONTHS)) == 32

    def test_short_month_dropped(self, tmp_path):
        write_rows(
            tmp_path / "w.csv",
            [("A", "2010-01-01T00:00", "1"), ("A", "2010-01-01T01:00", "2"), ("A", "2010-02-01T00:00", "3")],
        )
        recs = ingest_wind_csv(tmp_path / "w.csv").stations["A"]
        with pytest.warns(UserWarning, match="Feb 10"):
            out = monthly_split(recs)
        assert [lab for lab, _ in out] == ["Jan 10"]

    def test_empty(self):
        with pytest.raises(IngestionError):
            monthly_split([])


class TestCluster:
    def test_recovers_planted_groups(self, planted_series, tmp_path):
        path, labels = planted_series
        config = RunConfig(
            input=str(path), input_format="series", lags=[1], radius=[0.7], fuzziness=[1.9],
            clusters=[2], restarts=10, out=str(tmp_path / "out"),
        )
        part, names, summary = cmd_cluster(config)
        U, truth = part.memberships, np.asarray(labels)
        for k in (0, 1):
            col = np.argmax(U[truth == k].sum(axis=0))
            assert np.mean(U[truth == k, col] > 0.7) > 0.5
        assert np.argmax(U[truth == 0].sum(axis=0)) != np.argmax(U[truth == 1].sum(axis=0))
        assert summary["lags"] == [1] and summary["n_series"] == 10

        rows = read_csv(tmp_path / "out" / "memberships.csv")
        assert rows[0] == ["series", "C1", "C2", "medoid"] and len(rows) == 11
        assert sum(r[3] != "" for r in rows[1:]) == 2
        for r in rows[1:]:
            assert float(r[1]) + float(r[2]) == pytest.approx(1.0, abs=2e-4)
        assert len(read_csv(tmp_path / "out" / "medoids.csv")) == 3
        fp = read_csv(tmp_path / "out" / "fingerprint.csv")
        assert fp[0] == ["cluster", "series", "lag", "tau", "tau2", "cqa"] and len(fp) == 1 + 2 * 9

    def test_grid_search_and_lag_selection(self, planted_series, tmp_path):
        path, labels = planted_series
        config = RunConfig(
            input=str(path), input_format="series", radius=[0.5, 1.0], fuzziness=[1.3, 1.6],
            restarts=5, out=str(tmp_path / "out"),
        )
        part, _, summary = cmd_cluster(config)
        assert 1 in summary["lags"]
        assert len(summary["selection"]["scores"]) == 4
        assert arif(part.memberships, labels) > 0.7

    def test_wind_layout(self, wind_fixture, tmp_path):
        path, regimes = wind_fixture
        config = RunConfig(input=str(path), lags=[1, 2], radius=[0.7], fuzziness=[1.9], clusters=[2],
                           restarts=5, out=str(tmp_path / "out"))
        _, names, summary = cmd_cluster(config)
        assert names[:4] == ["Jan 10", "Feb 10", "Mar 10", "Jun 10"]
        assert summary["ingestion"]["stations"] == {"ABHA": 70128}
        rows = read_csv(tmp_path / "out" / "memberships.csv")
        assert len(rows) == 65 and rows[1][0] == "Jan 10"

    def test_too_many_clusters(self, planted_series, tmp_path):
        path, _ = planted_series
        config = RunConfig(input=str(path), input_format="series", lags=[1], radius=[0.7], fuzziness=[1.5],
                           clusters=[10], out=str(tmp_path / "o"))
        with pytest.raises(InvalidConfigError):
            cmd_cluster(config)

    def test_unknown_station(self, wind_fixture, tmp_path):
        config = RunConfig(input=str(wind_fixture[0]), station="XYZ", out=str(tmp_path / "o"))
        with pytest.raises(InvalidConfigError):
            cmd_cluster(config)


class TestOtherCommands:
    def test_mds(self, tmp_path):
        config = RunConfig(command="mds", scenario="2", per_cluster=1, length=200, lags=[1, 2],
                           radius=[1.0], out=str(tmp_path / "a"))
        cmd_mds(config)
        rows = read_csv(tmp_path / "a" / "coordinates.csv")
        assert rows[0] == ["index", "a", "b", "label"] and len(rows) == 4
        stress = json.loads((tmp_path / "a" / "stress.json").read_text())
        assert 0 <= stress["stress"] <= 1
        cmd_mds(RunConfig(**{**config.__dict__, "out": str(tmp_path / "b")}))
        assert (tmp_path / "b" / "coordinates.csv").read_text() == (tmp_path / "a" / "coordinates.csv").read_text()

    def test_simulate_and_replay(self, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--scenario", "1", "--trials", "2", "--restarts", "2", "--length", "120",
                     "--fuzziness", "1.5", "--radius", "0.7", "--out", str(out)]) == 0
        rows = read_csv(out / "accuracy.csv")
        assert rows[0] == ["m", "ARIF_CQA", "ARIF_FL", "ARIF_JS", "ARIF_QA", "JIF_CQA", "JIF_FL", "JIF_JS", "JIF_QA"]
        assert len(rows) == 2
        summary = json.loads((out / "summary.json").read_text())
        assert summary["lags"] == [1, 2, 3] and summary["T"] == 120
        replay = tmp_path / "replay"
        assert main(["simulate", "--config", str(out / "manifest.json"), "--out", str(replay)]) == 0
        assert (replay / "accuracy.csv").read_text() == (out / "accuracy.csv").read_text()

    def test_simulate_cutoff(self, tmp_path):
        config = RunConfig(command="simulate", scenario="5", trials=2, restarts=2, length=100,
                           fuzziness=[1.5, 2.0], radius=[0.7], metrics=["CQA", "FL"], out=str(tmp_path / "c"))
        cmd_simulate(config)
        rows = read_csv(tmp_path / "c" / "curve_CQA.csv")
        assert rows[0] == ["m", "rate"] and len(rows) == 3
        summary = json.loads((tmp_path / "c" / "summary.json").read_text())
        assert set(summary) >= {"CQA", "FL"}
        assert summary["CQA"]["aufc"] is not None and 0 <= summary["FL"]["maximum"] <= 1

    def test_motivating(self, tmp_path):
        config = RunConfig(command="motivating", length=200, replicates=2, radius=[0.5, 1.0], out=str(tmp_path / "m"))
        cmd_motivating(config)
        rows = read_csv(tmp_path / "m" / "distances.csv")
        assert len(rows) == 1 + 2 + 2

    def test_exit_codes(self, tmp_path, capsys):
        assert main(["cluster", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "x")]) == 2
        assert "error:" in capsys.readouterr().err
        assert main(["simulate", "--scenario", "9", "--out", str(tmp_path / "y")]) == 2
        with pytest.raises(SystemExit):
            main(["nonsense"])


class TestRunConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"command": "x"}, {"trials": 0}, {"cutoff": 1.0}, {"months": "spring"}, {"fuzziness": [1.0]},
         {"clusters": [1]}, {"metric": "ABC"}, {"length": 2}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidConfigError):
            RunConfig(**kwargs)

    def test_from_file_rejects_unknown_keys(self, tmp_path):
        (tmp_path / "c.json").write_text(json.dumps({"command": "cluster", "colour": "red"}))
        with pytest.raises(InvalidConfigError):
            RunConfig.from_file(tmp_path / "c.json")

    def test_cli_overrides_file(self, tmp_path):
        (tmp_path / "c.json").write_text(json.dumps({"command": "cluster", "seed": 4, "restarts": 7}))
        config = parse_config(["cluster", "--config", str(tmp_path / "c.json"), "--seed", "9"])
        assert (config.seed, config.restarts) == (9, 7)
