"""Core dated-series records: price levels in, P&L increments out.

Dates are held as numpy ``datetime64[D]`` arrays; calendars are purely
positional (a period is a period), so irregular spacing is accepted and the
only hard requirement is strict monotonicity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "PriceSeries",
    "PnlSeries",
    "daily_calendar",
    "infer_periods_per_year",
    "write_price_csv",
    "write_pnl_csv",
]


def _as_date_array(dates) -> np.ndarray:
    arr = np.asarray(dates, dtype="datetime64[D]")
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("dates must be a non-empty 1-D sequence")
    if arr.size > 1 and not np.all(np.diff(arr).astype(np.int64) > 0):
        raise ValueError("dates must be strictly increasing with no duplicates")
    arr.setflags(write=False)
    return arr


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceSeries:
    """Dated price levels for one contract."""

    contract_id: str
    dates: np.ndarray
    prices: np.ndarray
    periods_per_year: int

    def __post_init__(self):
        object.__setattr__(self, "dates", _as_date_array(self.dates))
        prices = _as_float_array(self.prices, "prices")
        if prices.size != self.dates.size:
            raise ValueError("prices and dates must have the same length")
        if np.any(prices <= 0):
            raise ValueError("prices must be strictly positive")
        object.__setattr__(self, "prices", prices)
        if int(self.periods_per_year) <= 0:
            raise ValueError("periods_per_year must be positive")
        object.__setattr__(self, "periods_per_year", int(self.periods_per_year))

    def __len__(self) -> int:
        return self.prices.size


@dataclass(frozen=True)
class PnlSeries:
    """Dated strategy P&L increments in risk units (currency-free)."""

    dates: np.ndarray
    pnl: np.ndarray
    periods_per_year: int
    label: str = field(default="pnl")

    def __post_init__(self):
        object.__setattr__(self, "dates", _as_date_array(self.dates))
        pnl = _as_float_array(self.pnl, "pnl")
        if pnl.size != self.dates.size:
            raise ValueError("pnl and dates must have the same length")
        object.__setattr__(self, "pnl", pnl)
        if int(self.periods_per_year) <= 0:
            raise ValueError("periods_per_year must be positive")
        object.__setattr__(self, "periods_per_year", int(self.periods_per_year))

    def __len__(self) -> int:
        return self.pnl.size

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.pnl)


def daily_calendar(n: int, start: str = "2000-01-03") -> np.ndarray:
    """Synthetic calendar of ``n`` consecutive dates starting at ``start``."""
    if n < 1:
        raise ValueError("calendar length must be >= 1")
    return np.datetime64(start, "D") + np.arange(n)


def infer_periods_per_year(dates: np.ndarray) -> int:
    """Infer the annualization count from the median calendar spacing.

    Spacing of up to 3 days maps to business-daily (252), roughly weekly
    spacing to 52 and roughly monthly to 12; anything slower falls back to
    ``round(365.25 / spacing)``. Series too short to measure default to 252.
    """
    if dates.size < 2:
        return 252
    spacing = float(np.median(np.diff(dates).astype(np.int64)))
    if spacing <= 3:
        return 252
    if spacing <= 10:
        return 52
    if spacing <= 45:
        return 12
    return max(1, round(365.25 / spacing))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_price_csv(series: PriceSeries, path) -> None:
    """Emit ``date,price`` rows; floats keep full round-trip precision."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "price"])
        for d, p in zip(np.datetime_as_string(series.dates), series.prices):
            writer.writerow([d, _fmt(p)])


def write_pnl_csv(pnl: PnlSeries, path) -> None:
    """Emit ``date,pnl,cum_pnl`` rows for cumulative-P&L plotting."""
    cum = pnl.cumulative()
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "pnl", "cum_pnl"])
        for d, x, c in zip(np.datetime_as_string(pnl.dates), pnl.pnl, cum):
            writer.writerow([d, _fmt(x), _fmt(c)])
