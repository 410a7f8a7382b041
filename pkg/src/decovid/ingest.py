"""Parsers for the two external CSV wire formats.

Monthly macro panels arrive in the FRED-MD layout: a header row, a
"Transform:" row of integer codes, then one row per month.  Daily virus
counts arrive in the covidtracking national-history layout with the columns
hospitalizedIncrease / positiveIncrease / deathIncrease.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .panel import MacroPanel

MISSING_MARKERS = {"", "na", "nan", "."}

_DATE_PATTERNS = (
    ("%m/%d/%Y", re.compile(r"^\d{1,2}/\d{1,2}/\d{4}$")),
    ("%Y-%m-%d", re.compile(r"^\d{4}-\d{2}-\d{2}$")),
    ("%Y-%m", re.compile(r"^\d{4}-\d{2}$")),
)


class FormatError(ValueError):
    """Raised when a CSV does not follow its declared wire format."""


@dataclass
class DailyCovidSeries:
    dates: np.ndarray                   # datetime64[D], ascending
    hospitalized_increase: np.ndarray   # float counts, >= 0
    positive_increase: np.ndarray
    death_increase: np.ndarray
    warnings: list[str] = field(default_factory=list)

    def series(self, kind: str) -> np.ndarray:
        return {
            "H": self.hospitalized_increase,
            "P": self.positive_increase,
            "D": self.death_increase,
        }[kind]


def _parse_date(token: str, where: str) -> np.datetime64:
    token = token.strip()
    for fmt, pat in _DATE_PATTERNS:
        if pat.match(token):
            try:
                ts = pd.to_datetime(token, format=fmt)
            except ValueError as exc:
                raise FormatError(f"{where}: unparseable date {token!r}") from exc
            return np.datetime64(ts, "D")
    raise FormatError(f"{where}: unparseable date {token!r}")


def _parse_cell(token: str) -> float:
    if token.strip().lower() in MISSING_MARKERS:
        return np.nan
    try:
        return float(token)
    except ValueError as exc:
        raise FormatError(f"non-numeric cell {token!r}") from exc


def parse_fredmd(csv_text: str) -> MacroPanel:
    """Parse a FRED-MD vintage into a monthly panel.

    Row 1 is the header (date column plus series names), row 2 carries the
    transform codes, the rest are monthly observations.  Empty cells, "NA"
    and "NaN" become missing values; blank trailing lines are ignored.
    """
    rows = list(_csv_rows(csv_text))
    if len(rows) < 3:
        raise FormatError("need a header row, a transform row, and at least one data row")

    header = rows[0]
    names = [c.strip() for c in header[1:] if c.strip()]
    n = len(names)
    if n == 0:
        raise FormatError("header row names no series")

    trow = rows[1]
    if not trow or "transform" not in trow[0].strip().lower():
        raise FormatError(f"second row must carry transform codes, got {trow[:1]!r}")
    codes = [c for c in trow[1:1 + n]]
    if len(codes) != n:
        raise FormatError(f"{len(codes)} transform codes for {n} series")
    tcodes = []
    for name, c in zip(names, codes):
        try:
            val = float(c)
        except ValueError as exc:
            raise FormatError(f"non-numeric transform code {c!r} for {name}") from exc
        if val != int(val):
            raise FormatError(f"non-integer transform code {c!r} for {name}")
        if not 1 <= int(val) <= 7:
            raise FormatError(f"transform code {int(val)} for {name} outside 1..7")
        tcodes.append(int(val))

    dates, values = [], []
    for i, row in enumerate(rows[2:], start=3):
        day = _parse_date(row[0], f"row {i}")
        month = day.astype("datetime64[M]")
        cells = row[1:1 + n]
        if len(cells) < n:
            cells = cells + [""] * (n - len(cells))
        try:
            vals = [_parse_cell(c) for c in cells]
        except FormatError as exc:
            raise FormatError(f"row {i} ({month}): {exc}") from exc
        dates.append(month)
        values.append(vals)

    dates = np.array(dates, dtype="datetime64[M]")
    if len(np.unique(dates)) != len(dates):
        dup = dates[np.concatenate(([False], np.diff(dates).astype(int) == 0))][0]
        raise FormatError(f"duplicate month {dup}")
    if np.any(np.diff(dates).astype(int) != 1):
        gap = dates[np.argmax(np.diff(dates).astype(int) != 1)]
        raise FormatError(f"months are not consecutive after {gap}")

    return MacroPanel(dates=dates, names=names, values=np.array(values), tcodes=np.array(tcodes))


def serialize_fredmd(panel: MacroPanel) -> str:
    """Inverse of parse_fredmd; float cells are written in round-trip form."""
    if panel.tcodes is None:
        raise ValueError("panel has no transform codes to serialize")
    lines = ["sasdate," + ",".join(panel.names)]
    lines.append("Transform:," + ",".join(str(c) for c in panel.tcodes))
    for t, month in enumerate(panel.dates):
        cells = [
            "" if np.isnan(v) else repr(float(v))
            for v in panel.values[t]
        ]
        lines.append(f"{month}-01," + ",".join(cells))
    return "\n".join(lines) + "\n"


def parse_covid_tracking(csv_text: str) -> DailyCovidSeries:
    """Parse a covidtracking national-history download.

    Requires the date column plus the three *Increase count columns; other
    columns are ignored.  Missing counts are treated as zero and negative
    revision artifacts are clamped to zero with a recorded warning.
    """
    frame = pd.read_csv(io.StringIO(csv_text), dtype=str)
    frame.columns = [c.strip() for c in frame.columns]
    required = ["date", "hospitalizedIncrease", "positiveIncrease", "deathIncrease"]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise FormatError(f"missing required column(s): {', '.join(missing)}")

    dates = np.array(
        [_parse_date(str(d), f"data row {i + 2}") for i, d in enumerate(frame["date"])],
        dtype="datetime64[D]",
    )
    if len(np.unique(dates)) != len(dates):
        raise FormatError("duplicate day in daily series")

    order = np.argsort(dates)
    warnings: list[str] = []
    counts = {}
    for col in required[1:]:
        raw = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=float)[order]
        raw = np.where(np.isnan(raw), 0.0, raw)
        neg = raw < 0
        if neg.any():
            for i in np.flatnonzero(neg):
                warnings.append(f"{col} {dates[order][i]}: negative increment {raw[i]:g} clamped to 0")
            raw = np.where(neg, 0.0, raw)
        counts[col] = raw

    return DailyCovidSeries(
        dates=dates[order],
        hospitalized_increase=counts["hospitalizedIncrease"],
        positive_increase=counts["positiveIncrease"],
        death_increase=counts["deathIncrease"],
        warnings=warnings,
    )


def _csv_rows(text: str):
    import csv

    for row in csv.reader(io.StringIO(text)):
        if not row or all(not c.strip() for c in row):
            continue
        yield row
