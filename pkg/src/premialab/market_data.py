"""Price-series ingestion and synthetic market models.

The CSV loader validates real data; the three generators (geometric Brownian
motion, jump diffusion, persistent-drift) produce the synthetic underlyings
used by the trend engine and the options lab. Generators work in log space so
prices stay positive, and are pure functions of their parameter record: the
same seed always reproduces the same path bit for bit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .errors import (
    DataError,
    MalformedRowError,
    MissingFileError,
    NonIncreasingDatesError,
    NonPositivePriceError,
)
from .rng import make_rng
from .series import PriceSeries, daily_calendar, infer_periods_per_year

__all__ = [
    "GbmParams",
    "JumpParams",
    "TrendyParams",
    "load_csv",
    "gen_gbm",
    "gen_jump_diffusion",
    "gen_trendy",
]


@dataclass(frozen=True)
class GbmParams:
    """Geometric Brownian motion: constant log drift and volatility."""

    drift_annual: float
    vol_annual: float
    s0: float
    n_periods: int
    periods_per_year: int = 252
    seed: int = 0

    def __post_init__(self):
        if self.vol_annual < 0:
            raise ValueError("vol_annual must be >= 0")
        if self.s0 <= 0:
            raise ValueError("s0 must be positive")
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")
        if self.periods_per_year < 1:
            raise ValueError("periods_per_year must be >= 1")


@dataclass(frozen=True)
class JumpParams:
    """GBM plus Poisson-arriving log jumps (crash dynamics when mean < 0)."""

    base: GbmParams
    jump_intensity_annual: float
    jump_mean_log: float = 0.0
    jump_std_log: float = 0.0

    def __post_init__(self):
        if self.jump_intensity_annual < 0:
            raise ValueError("jump_intensity_annual must be >= 0")
        if self.jump_std_log < 0:
            raise ValueError("jump_std_log must be >= 0")


@dataclass(frozen=True)
class TrendyParams:
    """GBM with a persistent latent drift (AR(1) with a given half-life).

    Half-life is quoted in business days: one period at 252 periods/year.
    """

    base: GbmParams
    drift_state_vol_annual: float
    drift_persistence_halflife_days: float

    def __post_init__(self):
        if self.drift_state_vol_annual < 0:
            raise ValueError("drift_state_vol_annual must be >= 0")
        if self.drift_persistence_halflife_days <= 0:
            raise ValueError("drift_persistence_halflife_days must be positive")


def load_csv(path, contract_id: str | None = None, periods_per_year: int | None = None) -> PriceSeries:
    """Load and validate a ``date,price`` CSV into a :class:`PriceSeries`.

    Line numbers in error messages are 1-based and count the header line.
    ``periods_per_year`` overrides the spacing-based inference.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    dates: list[date] = []
    prices: list[float] = []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["date", "price"]:
            raise MalformedRowError(f"{path}: line 1: expected header 'date,price'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise MalformedRowError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            raw_date, raw_price = row[0].strip(), row[1].strip()
            try:
                d = date.fromisoformat(raw_date)
            except ValueError as exc:
                raise MalformedRowError(f"{path}: line {lineno}: bad date {raw_date!r}: {exc}") from None
            try:
                p = float(raw_price)
            except ValueError:
                raise MalformedRowError(f"{path}: line {lineno}: bad price {raw_price!r}") from None
            if not np.isfinite(p) or p <= 0:
                raise NonPositivePriceError(f"{path}: line {lineno}: price must be positive, got {raw_price}")
            if dates and d <= dates[-1]:
                raise NonIncreasingDatesError(
                    f"{path}: line {lineno}: date {d.isoformat()} not after {dates[-1].isoformat()}"
                )
            dates.append(d)
            prices.append(p)
    if not dates:
        raise DataError(f"{path}: no data rows")
    date_arr = np.array([d.isoformat() for d in dates], dtype="datetime64[D]")
    ppy = periods_per_year if periods_per_year is not None else infer_periods_per_year(date_arr)
    return PriceSeries(
        contract_id=contract_id if contract_id is not None else path.stem,
        dates=date_arr,
        prices=np.array(prices),
        periods_per_year=ppy,
    )


def _to_series(log_steps: np.ndarray, p: GbmParams, contract_id: str) -> PriceSeries:
    # n_periods steps => n_periods + 1 price points, so the series carries
    # exactly n_periods returns.
    prices = p.s0 * np.exp(np.concatenate(([0.0], np.cumsum(log_steps))))
    return PriceSeries(
        contract_id=contract_id,
        dates=daily_calendar(p.n_periods + 1),
        prices=prices,
        periods_per_year=p.periods_per_year,
    )


def gen_gbm(p: GbmParams, contract_id: str = "synthetic") -> PriceSeries:
    """Simulate GBM: log step ``(drift - vol^2/2) dt + vol sqrt(dt) z``."""
    rng = make_rng(p.seed, contract_id)
    dt = 1.0 / p.periods_per_year
    z = rng.standard_normal(p.n_periods)
    steps = (p.drift_annual - 0.5 * p.vol_annual**2) * dt + p.vol_annual * np.sqrt(dt) * z
    return _to_series(steps, p, contract_id)


def gen_jump_diffusion(p: JumpParams, contract_id: str = "synthetic") -> PriceSeries:
    """GBM steps plus, with probability ``intensity * dt`` per period, an
    extra log jump drawn Normal(jump_mean_log, jump_std_log).

    With intensity zero the Gaussian stream is consumed identically to
    :func:`gen_gbm`, so the path is bit-identical to ``gen_gbm(p.base)``.
    """
    base = p.base
    rng = make_rng(base.seed, contract_id)
    dt = 1.0 / base.periods_per_year
    z = rng.standard_normal(base.n_periods)
    steps = (base.drift_annual - 0.5 * base.vol_annual**2) * dt + base.vol_annual * np.sqrt(dt) * z
    jump_prob = min(1.0, p.jump_intensity_annual * dt)
    jumped = rng.random(base.n_periods) < jump_prob
    jumps = p.jump_mean_log + p.jump_std_log * rng.standard_normal(base.n_periods)
    steps = steps + np.where(jumped, jumps, 0.0)
    return _to_series(steps, p.base, contract_id)


def gen_trendy(p: TrendyParams, contract_id: str = "synthetic") -> PriceSeries:
    """GBM with an AR(1) latent annual drift added on top of the base drift.

    The latent state has stationary standard deviation
    ``drift_state_vol_annual`` and persistence ``2^(-1/halflife)`` per period;
    it starts from a stationary draw. With state volatility zero the path is
    bit-identical to ``gen_gbm(p.base)``.
    """
    base = p.base
    rng = make_rng(base.seed, contract_id)
    dt = 1.0 / base.periods_per_year
    z = rng.standard_normal(base.n_periods)
    eta = rng.standard_normal(base.n_periods)
    halflife_periods = p.drift_persistence_halflife_days * base.periods_per_year / 252.0
    phi = 2.0 ** (-1.0 / halflife_periods)
    sigma_state = p.drift_state_vol_annual
    if sigma_state == 0.0:
        mu = np.zeros(base.n_periods)
    else:
        sigma_innov = sigma_state * np.sqrt(1.0 - phi * phi)
        eta[0] *= sigma_state / sigma_innov
        mu = lfilter([sigma_innov], [1.0, -phi], eta)
    steps = (
        (base.drift_annual - 0.5 * base.vol_annual**2) * dt
        + mu * dt
        + base.vol_annual * np.sqrt(dt) * z
    )
    return _to_series(steps, base, contract_id)
