import calendar
import csv
import math
from datetime import datetime, timedelta

import numpy as np
import pytest

from circclust.simulation import build_scenario, gen_qar, scenario, wrap
from circclust.wind import SUMMER_MONTHS, WINTER_MONTHS

YEARS = range(2010, 2018)


def write_wind_fixture(path, seed=0, station="ABHA", years=YEARS):
    """Hourly directions: winter months from one QAR regime, summer from another.

    The remaining months are white noise so that an unfiltered split still
    sees every month. Returns the planted regime of each seasonal month in
    chronological order (0 winter, 1 summer).
    """
    spec = scenario(2)
    winter_gen, summer_gen = spec.clusters[0][0], spec.clusters[1][0]
    streams = iter(np.random.SeedSequence(seed).spawn(12 * len(years)))
    regimes = []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["station", "timestamp", "direction_deg"])
        for year in years:
            for month in range(1, 13):
                n = calendar.monthrange(year, month)[1] * 24
                rng = np.random.default_rng(next(streams))
                if month in WINTER_MONTHS:
                    x = gen_qar(winter_gen, n, rng)
                    regimes.append(0)
                elif month in SUMMER_MONTHS:
                    x = gen_qar(summer_gen, n, rng)
                    regimes.append(1)
                else:
                    x = rng.standard_normal(n)
                deg = np.degrees(wrap(x))
                start = datetime(year, month, 1)
                for h, d in enumerate(deg):
                    d = round(float(d), 4)
                    w.writerow([station, (start + timedelta(hours=h)).isoformat(), 0.0 if d >= 360.0 else d])
    return regimes


@pytest.fixture(scope="session")
def wind_fixture(tmp_path_factory):
    path = tmp_path_factory.mktemp("wind") / "abha.csv"
    regimes = write_wind_fixture(path, seed=2024)
    return path, regimes


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one ``CRITERION n: PASS|FAIL`` line, echoed in the terminal summary."""

    def report(number, passed, detail):
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
