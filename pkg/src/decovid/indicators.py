"""Monthly virus indicators built from daily counts.

Each indicator is the monthly sum of a daily increase series (levels V_t)
together with its log growth rate v_t = log(V_t / V_{t-1}).  Growth is the
regression input; levels are kept for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ingest import DailyCovidSeries
from .panel import to_month

KINDS = ("H", "P", "D")


@dataclass
class CovidIndicator:
    kind: str           # "H", "P" or "D"
    months: np.ndarray  # datetime64[M], consecutive
    V: np.ndarray       # monthly sums of daily increments
    v: np.ndarray       # log(V_t / V_{t-1}); NaN where undefined
    notes: list[str] = field(default_factory=list)

    def growth_at(self, month) -> float:
        m = to_month(month)
        idx = np.flatnonzero(self.months == m)
        if idx.size == 0:
            raise KeyError(f"month {m} outside indicator range")
        return float(self.v[idx[0]])

    def aligned_growth(self, dates: np.ndarray) -> np.ndarray:
        """v on an arbitrary monthly grid; months outside the range are 0.

        The indicator is zero before its own sample by construction, so
        mapping out-of-range months to 0 extends it to a long macro sample.
        """
        out = np.zeros(len(dates))
        idx = {m: i for i, m in enumerate(self.months.tolist())}
        for t, d in enumerate(np.asarray(dates, dtype="datetime64[M]").tolist()):
            i = idx.get(d)
            if i is not None:
                out[t] = 0.0 if np.isnan(self.v[i]) else self.v[i]
        return out


def aggregate_monthly(daily: DailyCovidSeries, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Sum a daily increase series into calendar-month levels.

    The month range runs from the first to the last observed day; months
    inside that range with no rows aggregate to zero.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    series = daily.series(kind)
    months = daily.dates.astype("datetime64[M]")
    first, last = months.min(), months.max()
    grid = np.arange(first, last + 1)
    level = np.zeros(len(grid))
    # small grid; a scatter-add beats a groupby here
    pos = (months - first).astype(int)
    np.add.at(level, pos, series)
    return grid, level


def growth_rate(V: np.ndarray, kind: str = "P") -> tuple[np.ndarray, list[str]]:
    """Log growth v_t = log(V_t / V_{t-1}) with the outbreak-edge conventions.

    The first month has no predecessor and is NaN.  Months where both
    neighbours are zero (pre-outbreak) get 0 so downstream designs carry
    numeric zeros.  A positive month after a zero month is undefined (NaN),
    except that for hospitalizations the zero month immediately before the
    first positive month is treated as V = 1.
    """
    V = np.asarray(V, dtype=float)
    v = np.full(len(V), np.nan)
    notes: list[str] = []
    prev = V[:-1].copy()
    cur = V[1:]
    if kind == "H":
        pos = np.flatnonzero(cur > 0)
        if pos.size and prev[pos[0]] == 0:
            prev[pos[0]] = 1.0
            notes.append("H: zero month before first positive month treated as 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.log(cur / prev)
    g[(cur == 0) & (prev == 0)] = 0.0
    g[~np.isfinite(g)] = np.nan
    v[1:] = g
    return v, notes


def build_indicator(daily: DailyCovidSeries, kind: str) -> CovidIndicator:
    months, V = aggregate_monthly(daily, kind)
    v, notes = growth_rate(V, kind)
    return CovidIndicator(kind=kind, months=months, V=V, v=v, notes=notes)
