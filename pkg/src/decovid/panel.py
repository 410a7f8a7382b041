"""Panel containers shared by every stage of the pipeline.

A panel is a T x N float matrix with a monthly date index and per-series
names; NaN marks a missing cell.  Transform codes ride along from ingestion
so later stages can report errors by series name and date.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd


def to_month(value) -> np.datetime64:
    """Coerce a string/date-like to a numpy month (datetime64[M])."""
    return np.datetime64(value, "M")


def month_range(start, n: int) -> np.ndarray:
    """n consecutive months starting at `start`."""
    return to_month(start) + np.arange(n)


@dataclass
class MacroPanel:
    dates: np.ndarray          # datetime64[M], length T
    names: list[str]
    values: np.ndarray         # T x N float64, NaN = missing
    tcodes: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.dates = np.asarray(self.dates, dtype="datetime64[M]")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("panel values must be 2-D (T x N)")
        if self.values.shape != (len(self.dates), len(self.names)):
            raise ValueError(
                f"shape mismatch: values {self.values.shape}, "
                f"{len(self.dates)} dates x {len(self.names)} names"
            )
        if self.tcodes is not None:
            self.tcodes = np.asarray(self.tcodes, dtype=int)
            if len(self.tcodes) != len(self.names):
                raise ValueError("tcodes length must equal number of series")

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def month_index(self, month) -> int:
        """Position of `month` in the date index."""
        pos = np.searchsorted(self.dates, to_month(month))
        if pos >= len(self.dates) or self.dates[pos] != to_month(month):
            raise KeyError(f"month {month} not in panel index")
        return int(pos)

    def subperiod(self, start=None, end=None) -> "MacroPanel":
        """Rows with start <= date <= end (inclusive, either side optional)."""
        mask = np.ones(self.n_periods, dtype=bool)
        if start is not None:
            mask &= self.dates >= to_month(start)
        if end is not None:
            mask &= self.dates <= to_month(end)
        return replace(self, dates=self.dates[mask], values=self.values[mask])

    def copy(self) -> "MacroPanel":
        return replace(self, values=self.values.copy(), dates=self.dates.copy())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, index=self.dates.astype(str), columns=self.names)


def resolve_t0(t0, dates: np.ndarray) -> int:
    """Index of the last pre-shock month.

    `t0` may be an integer count of pre-shock rows or a month; a month is
    located in `dates`.
    """
    if isinstance(t0, (int, np.integer)):
        idx = int(t0) - 1
        if not 0 <= idx < len(dates):
            raise ValueError(f"t0={t0} outside sample of length {len(dates)}")
        return idx
    month = to_month(t0)
    pos = np.searchsorted(dates, month)
    if pos >= len(dates) or dates[pos] != month:
        raise ValueError(f"t0 month {t0} not in the date index")
    return int(pos)
