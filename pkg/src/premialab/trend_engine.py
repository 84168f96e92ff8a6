"""Five-month trend signal, volatility targeting and the aggregate portfolio.

All computations are strictly causal: signals, volatility estimates and
positions at period ``t`` use price information up to ``t - 1`` only, so
truncating the input reproduces the prefix of every output bit for bit.
P&L is arithmetic (futures convention): position times price change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import DegenerateError
from .series import PnlSeries, PriceSeries

__all__ = [
    "TrendConfig",
    "SignalSeries",
    "ema",
    "trend_signal",
    "vol_estimate",
    "target_positions",
    "contract_pnl",
    "aggregate",
]

SIGNAL_MODES = ("sign", "linear_clipped")

# Slope divisor for the linear-clipped signal: raw / (KAPPA * sigma), then
# clipped to [-1, 1].
KAPPA = 2.0

# sigma floor, as a fraction of the mean price level, so degenerate flat
# series cannot produce unbounded positions.
VOL_FLOOR_SCALE = 1e-12


@dataclass(frozen=True)
class TrendConfig:
    """Knobs of the trend strategy; defaults give the five-month variant."""

    signal_timescale_months: float = 5.0
    vol_halflife_periods: int = 21
    target_vol_annual: float = 1.0
    warmup_periods: int = 63
    signal_clip: str = "sign"

    def __post_init__(self):
        if self.signal_timescale_months <= 0:
            raise ValueError("signal_timescale_months must be positive")
        if self.vol_halflife_periods < 2:
            raise ValueError("vol_halflife_periods must be >= 2")
        if self.target_vol_annual <= 0:
            raise ValueError("target_vol_annual must be positive")
        if self.warmup_periods < 0:
            raise ValueError("warmup_periods must be >= 0")
        if self.signal_clip not in SIGNAL_MODES:
            raise ValueError(f"signal_clip must be one of {SIGNAL_MODES}")


@dataclass(frozen=True)
class SignalSeries:
    """Per-period signal in [-1, +1], zero during warmup."""

    dates: np.ndarray
    values: np.ndarray
    periods_per_year: int

    def __post_init__(self):
        if np.any(np.abs(self.values) > 1.0):
            raise ValueError("signal values must lie in [-1, 1]")

    def __len__(self) -> int:
        return self.values.size


def ema(series: Sequence[float], halflife_periods: float) -> np.ndarray:
    """Exponential moving average with ``out[0] = series[0]``.

    Recursion: ``out[t] = lam * out[t-1] + (1 - lam) * series[t]`` with
    ``lam = 2 ** (-1 / halflife_periods)``.
    """
    if halflife_periods <= 0:
        raise ValueError("halflife_periods must be positive")
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a non-empty 1-D sequence")
    lam = 2.0 ** (-1.0 / halflife_periods)
    out = np.empty_like(x)
    out[0] = x[0]
    if x.size > 1:
        # lfilter runs the exact recursion in C; seeding the delay state with
        # lam * x[0] makes out[0] = x[0] hold without rescaling tricks.
        out[1:] = lfilter([1.0 - lam], [1.0, -lam], x[1:], zi=np.array([lam * x[0]]))[0]
    return out


def _timescale_periods(months: float, periods_per_year: int) -> int:
    return max(1, round(months * periods_per_year / 12.0))


def vol_estimate(prices: PriceSeries, halflife_periods: int) -> np.ndarray:
    """Causal EMA volatility of price changes.

    ``sigma[t]`` is the root of the EMA of squared price differences using
    changes up to ``t - 1`` only, floored at a tiny fraction of the price
    scale. The first two entries carry no information and sit at the floor.
    """
    if len(prices) < 2:
        raise ValueError("need at least 2 prices to estimate volatility")
    diffs = np.diff(prices.prices)
    smoothed = ema(diffs * diffs, halflife_periods)
    sigma = np.empty(len(prices))
    sigma[:2] = 0.0
    sigma[2:] = np.sqrt(smoothed[:-1])
    floor = VOL_FLOOR_SCALE * float(np.mean(prices.prices))
    return np.maximum(sigma, floor)


def trend_signal(prices: PriceSeries, cfg: TrendConfig) -> SignalSeries:
    """Trend signal: sign (or clipped slope) of price minus its own EMA.

    ``raw[t] = p[t-1] - EMA(p)[t-1]`` with the EMA half-life set by
    ``signal_timescale_months``; an exact zero maps to signal 0.
    """
    n = len(prices)
    if n <= cfg.warmup_periods:
        raise ValueError(f"series of length {n} shorter than warmup {cfg.warmup_periods}")
    h = _timescale_periods(cfg.signal_timescale_months, prices.periods_per_year)
    trend_ema = ema(prices.prices, h)
    raw = np.zeros(n)
    raw[1:] = prices.prices[:-1] - trend_ema[:-1]
    if cfg.signal_clip == "sign":
        values = np.sign(raw)
    else:
        sigma = vol_estimate(prices, cfg.vol_halflife_periods)
        values = np.clip(raw / (KAPPA * sigma), -1.0, 1.0)
    values[: max(1, cfg.warmup_periods)] = 0.0
    return SignalSeries(dates=prices.dates, values=values, periods_per_year=prices.periods_per_year)


def target_positions(prices: PriceSeries, cfg: TrendConfig) -> np.ndarray:
    """Vol-targeted position sizes: signal scaled to the per-period budget."""
    signal = trend_signal(prices, cfg)
    sigma = vol_estimate(prices, cfg.vol_halflife_periods)
    target_per_period = cfg.target_vol_annual / np.sqrt(prices.periods_per_year)
    return signal.values * target_per_period / sigma


def contract_pnl(prices: PriceSeries, cfg: TrendConfig) -> PnlSeries:
    """Per-contract strategy P&L: ``position[t] * (p[t] - p[t-1])``.

    Zero during warmup; ex ante the per-period variance equals the target by
    construction of the position sizing.
    """
    positions = target_positions(prices, cfg)
    pnl = np.zeros(len(prices))
    pnl[1:] = positions[1:] * np.diff(prices.prices)
    return PnlSeries(
        dates=prices.dates,
        pnl=pnl,
        periods_per_year=prices.periods_per_year,
        label=prices.contract_id,
    )


def aggregate(pnls: Sequence[PnlSeries], renormalize: bool = False) -> PnlSeries:
    """Sum P&L streams on the union calendar; absent dates contribute zero.

    With ``renormalize`` the summed increments are rescaled by their
    full-sample standard deviation so the aggregate realizes exactly unit
    annualized volatility (a presentation device, not a causal sizing rule).
    """
    if not pnls:
        raise ValueError("aggregate needs at least one PnlSeries")
    ppy = pnls[0].periods_per_year
    if any(p.periods_per_year != ppy for p in pnls):
        raise ValueError("all PnlSeries must share periods_per_year")
    calendar = pnls[0].dates
    for p in pnls[1:]:
        calendar = np.union1d(calendar, p.dates)
    total = np.zeros(calendar.size)
    for p in pnls:
        np.add.at(total, np.searchsorted(calendar, p.dates), p.pnl)
    if renormalize:
        sd = float(np.std(total, ddof=1)) if total.size > 1 else 0.0
        if sd == 0.0:
            raise DegenerateError("cannot renormalize an all-zero aggregate")
        total = total / (sd * np.sqrt(ppy))
    return PnlSeries(dates=calendar, pnl=total, periods_per_year=ppy, label="aggregate")
