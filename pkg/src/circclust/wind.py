"""Ingestion of hourly wind-direction records and monthly series assembly.

Input CSV columns: ``station``, ``timestamp`` (ISO 8601) and
``direction_deg`` in ``[0, 360)``.
"""

import calendar
import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .exceptions import IngestionError

__all__ = [
    "WindRecord",
    "WindData",
    "WINTER_MONTHS",
    "SUMMER_MONTHS",
    "SEASONAL_MONTHS",
    "ingest_wind_csv",
    "monthly_split",
    "month_label",
]

REQUIRED_COLUMNS = ("station", "timestamp", "direction_deg")
WINTER_MONTHS = frozenset({12, 1, 2, 3})
SUMMER_MONTHS = frozenset({6, 7, 8, 9})
SEASONAL_MONTHS = WINTER_MONTHS | SUMMER_MONTHS
MAX_INVALID_FRACTION = 0.05


@dataclass(frozen=True)
class WindRecord:
    station: str
    timestamp: datetime
    direction_deg: float

    @property
    def radians(self):
        return self.direction_deg * math.pi / 180.0


@dataclass(eq=False)
class WindData:
    """Parsed records per station plus an account of every input row.

    ``rows_read == rows_accepted + rows_rejected`` always holds; superseded
    duplicates count as rejected.
    """

    stations: dict
    rows_read: int
    rows_accepted: int
    rows_rejected: int
    errors: list = field(default_factory=list)

    def summary(self):
        return {
            "rows_read": self.rows_read,
            "rows_accepted": self.rows_accepted,
            "rows_rejected": self.rows_rejected,
            "stations": {k: len(v) for k, v in self.stations.items()},
            "errors": list(self.errors),
        }


def _parse_row(row):
    station = (row.get("station") or "").strip()
    if not station:
        raise ValueError("empty station")
    try:
        ts = datetime.fromisoformat(row["timestamp"].strip())
    except (ValueError, AttributeError):
        raise ValueError(f"unparseable timestamp {row.get('timestamp')!r}") from None
    try:
        deg = float(row["direction_deg"])
    except (TypeError, ValueError):
        raise ValueError(f"non-numeric direction {row.get('direction_deg')!r}") from None
    if not (0.0 <= deg < 360.0):
        raise ValueError(f"direction {deg} outside [0, 360)")
    return WindRecord(station, ts, deg)


def ingest_wind_csv(path):
    """Read and validate a wind-direction CSV.

    Invalid rows are reported with their line numbers. The whole file is
    rejected when more than 5% of its data rows are invalid. Rows sharing a
    station and timestamp keep the later row, with a warning.

    Returns
    -------
    WindData
        Records per station sorted by timestamp.

    Raises
    ------
    IngestionError
        Missing columns, or too many invalid rows (``.errors`` lists them).
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise IngestionError(f"{path}: missing column(s) {', '.join(missing)}")
        reader.fieldnames = header
        latest = {}
        errors = []
        invalid = 0
        superseded = 0
        n = 0
        for n, row in enumerate(reader, start=1):
            line = reader.line_num
            try:
                rec = _parse_row(row)
            except ValueError as exc:
                invalid += 1
                errors.append(f"line {line}: {exc}")
                continue
            key = (rec.station, rec.timestamp)
            if key in latest:
                superseded += 1
                msg = f"line {line}: duplicate timestamp {rec.timestamp.isoformat()} for {rec.station}; keeping this row"
                errors.append(msg)
                warnings.warn(msg, stacklevel=2)
            latest[key] = rec
    if n and invalid / n > MAX_INVALID_FRACTION:
        raise IngestionError(
            f"{path}: {invalid} of {n} rows invalid (more than {MAX_INVALID_FRACTION:.0%})", errors
        )
    stations = {}
    for rec in latest.values():
        stations.setdefault(rec.station, []).append(rec)
    for recs in stations.values():
        recs.sort(key=lambda r: r.timestamp)
    return WindData(stations, n, len(latest), invalid + superseded, errors)


def month_label(year, month):
    """``"MMM YY"``, e.g. ``"Jan 10"``."""
    return f"{calendar.month_abbr[month]} {year % 100:02d}"


def monthly_split(records, months=None):
    """One circular series (radians) per calendar month, in time order.

    Parameters
    ----------
    records : sequence of WindRecord
    months : collection of int, optional
        Calendar months to keep, e.g. :data:`SEASONAL_MONTHS`.

    Returns
    -------
    list of (str, ndarray)
        Months with fewer than two observations are dropped with a warning.
    """
    if not records:
        raise IngestionError("no records to split")
    groups = {}
    for rec in records:
        ts = rec.timestamp
        if months is not None and ts.month not in months:
            continue
        groups.setdefault((ts.year, ts.month), []).append(rec)
    out = []
    for (year, month), recs in sorted(groups.items()):
        label = month_label(year, month)
        if len(recs) < 2:
            warnings.warn(f"dropping {label}: only {len(recs)} observation(s)", stacklevel=2)
            continue
        recs.sort(key=lambda r: r.timestamp)
        out.append((label, np.array([r.radians for r in recs])))
    return out
