"""Short hedged strike-uniform strangles on synthetic underlyings.

Each period the strategy shorts one freshly struck strangle of fixed maturity
(a constant-maturity re-strike roll), delta-hedges it with the underlying, and
books the one-period mark-to-market. Marks use a flat implied volatility set
to the market model's expected realized volatility times ``1 + vol_premium``,
so a positive premium is carry collected by the option seller. Pooled paths
are rescaled ex post to unit annualized volatility ("constant expected risk").
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateError
from .market_data import GbmParams, JumpParams, gen_gbm, gen_jump_diffusion
from .rng import derive_seed
from .series import PnlSeries, daily_calendar
from .stats import SkewEstimator, StrategyStats, stats_of

__all__ = [
    "OptionKind",
    "OptionQuote",
    "StrangleSpec",
    "HedgedPnl",
    "bs_price",
    "bs_delta",
    "bs_vega",
    "build_strangle",
    "simulate_short_hedged",
    "constant_risk_normalize",
    "sweep_maturities",
    "write_scatter_csv",
]

_SQRT_2PI = np.sqrt(2.0 * np.pi)

# Guard against accidental huge simulations (paths x periods).
MAX_POOLED_PERIODS = 50_000_000


class OptionKind(enum.Enum):
    CALL = "call"
    PUT = "put"


@dataclass(frozen=True)
class OptionQuote:
    spot: float
    strike: float
    vol_implied_annual: float
    tau_years: float
    rate_annual: float = 0.0
    kind: OptionKind = OptionKind.CALL

    def __post_init__(self):
        if self.spot <= 0 or self.strike <= 0:
            raise ValueError("spot and strike must be positive")
        if self.vol_implied_annual <= 0:
            raise ValueError("vol_implied_annual must be positive")
        if self.tau_years <= 0:
            raise ValueError("tau_years must be positive")


@dataclass(frozen=True)
class StrangleSpec:
    """Definition of one short hedged strangle strategy."""

    tau_years: float
    market: GbmParams | JumpParams
    n_strikes: int = 7
    strike_width_sigmas: float = 1.5
    hedge_every_periods: int = 1
    vol_premium: float = 0.0

    def __post_init__(self):
        if not (1.0 / 12.0 - 1e-12 <= self.tau_years <= 1.0 + 1e-12):
            raise ValueError(
                f"tau_years must lie in [1/12, 1] (1 to 12 months), got {self.tau_years}"
            )
        if self.n_strikes < 3 or self.n_strikes % 2 == 0:
            raise ValueError("n_strikes must be an odd integer >= 3")
        if self.strike_width_sigmas <= 0:
            raise ValueError("strike_width_sigmas must be positive")
        if self.hedge_every_periods < 1:
            raise ValueError("hedge_every_periods must be >= 1")
        if self.vol_premium <= -1.0:
            raise ValueError("vol_premium must be > -1 (implied vol must stay positive)")
        if not isinstance(self.market, (GbmParams, JumpParams)):
            raise ValueError("market must be GbmParams or JumpParams")


@dataclass(frozen=True)
class HedgedPnl:
    """Pooled short-strangle P&L plus the spec that produced it."""

    pnl: PnlSeries
    spec: StrangleSpec
    label: str


def _d1(spot, strike, vol, tau, rate):
    st = vol * np.sqrt(tau)
    return (np.log(spot / strike) + (rate + 0.5 * vol * vol) * tau) / st


def _price_kernel(spot, strike, vol, tau, rate, is_call):
    # Broadcasts over any mix of scalars and arrays. OTM puts are priced
    # directly (not via parity) to avoid cancellation.
    d1 = _d1(spot, strike, vol, tau, rate)
    d2 = d1 - vol * np.sqrt(tau)
    disc = np.exp(-rate * tau)
    call = spot * ndtr(d1) - strike * disc * ndtr(d2)
    put = strike * disc * ndtr(-d2) - spot * ndtr(-d1)
    return np.where(is_call, call, put)


def _intrinsic_kernel(spot, strike, is_call):
    return np.where(is_call, np.maximum(spot - strike, 0.0), np.maximum(strike - spot, 0.0))


def _delta_kernel(spot, strike, vol, tau, rate, is_call):
    d1 = _d1(spot, strike, vol, tau, rate)
    return np.where(is_call, ndtr(d1), ndtr(d1) - 1.0)


def _vega_kernel(spot, strike, vol, tau, rate):
    d1 = _d1(spot, strike, vol, tau, rate)
    return spot * np.exp(-0.5 * d1 * d1) / _SQRT_2PI * np.sqrt(tau)


def bs_price(q: OptionQuote) -> float:
    """Black-Scholes price with continuous compounding."""
    return float(
        _price_kernel(
            q.spot, q.strike, q.vol_implied_annual, q.tau_years, q.rate_annual,
            q.kind is OptionKind.CALL,
        )
    )


def bs_delta(q: OptionQuote) -> float:
    """Analytic delta: in (0, 1) for calls, (-1, 0) for puts."""
    return float(
        _delta_kernel(
            q.spot, q.strike, q.vol_implied_annual, q.tau_years, q.rate_annual,
            q.kind is OptionKind.CALL,
        )
    )


def bs_vega(q: OptionQuote) -> float:
    """Sensitivity to implied vol (same for calls and puts)."""
    return float(
        _vega_kernel(q.spot, q.strike, q.vol_implied_annual, q.tau_years, q.rate_annual)
    )


def _strike_factors(spec: StrangleSpec, vol_implied: float) -> np.ndarray:
    width = spec.strike_width_sigmas * vol_implied * np.sqrt(spec.tau_years)
    if width >= 1.0:
        raise ValueError(f"strike grid of width {width:.3f} reaches non-positive strikes")
    mid = spec.n_strikes // 2
    return 1.0 + (np.arange(spec.n_strikes) - mid) * (width / mid)


def build_strangle(
    spot: float, spec: StrangleSpec, vol_implied: float
) -> list[tuple[OptionQuote, float]]:
    """Strike-uniform strangle: equal weights on an evenly spaced grid.

    Strikes span ``spot * (1 +/- width_sigmas * vol * sqrt(tau))``; strikes
    below spot carry puts, above carry calls, and the centre strike carries
    one put and one call at half weight each. The common weight is scaled so
    the portfolio's total vega equals 1 at inception.
    """
    if spot <= 0:
        raise ValueError("spot must be positive")
    if vol_implied <= 0:
        raise ValueError("vol_implied must be positive")
    factors = _strike_factors(spec, vol_implied)
    strikes = spot * factors
    vega_total = float(
        np.sum(_vega_kernel(spot, strikes, vol_implied, spec.tau_years, 0.0))
    )
    w = 1.0 / vega_total
    mid = spec.n_strikes // 2
    legs: list[tuple[OptionQuote, float]] = []
    for i, k in enumerate(strikes):
        quote = lambda kind: OptionQuote(  # noqa: E731
            spot=spot, strike=float(k), vol_implied_annual=vol_implied,
            tau_years=spec.tau_years, rate_annual=0.0, kind=kind,
        )
        if i < mid:
            legs.append((quote(OptionKind.PUT), w))
        elif i > mid:
            legs.append((quote(OptionKind.CALL), w))
        else:
            legs.append((quote(OptionKind.PUT), 0.5 * w))
            legs.append((quote(OptionKind.CALL), 0.5 * w))
    return legs


def model_expected_vol(market: GbmParams | JumpParams) -> float:
    """Annualized vol the model is expected to realize (diffusion + jumps)."""
    if isinstance(market, JumpParams):
        jump_var = market.jump_intensity_annual * (
            market.jump_mean_log**2 + market.jump_std_log**2
        )
        return float(np.sqrt(market.base.vol_annual**2 + jump_var))
    return market.vol_annual


def _leg_arrays(spec: StrangleSpec, factors: np.ndarray):
    mid = spec.n_strikes // 2
    leg_f = np.concatenate([factors[: mid + 1], factors[mid:]])
    leg_call = np.concatenate(
        [np.zeros(mid + 1, dtype=bool), np.ones(spec.n_strikes - mid, dtype=bool)]
    )
    leg_w = np.ones(spec.n_strikes + 1)
    leg_w[mid] = leg_w[mid + 1] = 0.5
    return leg_f, leg_call, leg_w


def simulate_short_hedged(
    spec: StrangleSpec,
    n_paths: int,
    seed: int,
    *,
    implied_vol: float | None = None,
    hedged: bool = True,
    normalize: bool = True,
    label: str | None = None,
) -> HedgedPnl:
    """Simulate the short hedged constant-maturity strangle roll.

    Each period holds one fresh strangle struck at the current spot (weights
    vega-normalized at inception) plus ``delta`` units of underlying, refreshed
    every ``hedge_every_periods``; the per-period P&L is the short strangle's
    mark-to-market change plus the hedge leg. Paths are generated from the
    market block with per-path sub-seeds derived from ``seed`` (the market's
    own seed field is ignored here), then concatenated on a synthetic calendar
    and normalized to unit annualized volatility.

    ``implied_vol``, ``hedged`` and ``normalize`` are diagnostic escapes:
    overriding the marking vol, dropping the hedge leg, or skipping the final
    rescale (useful on degenerate paths whose raw P&L has zero variance).
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    base = spec.market.base if isinstance(spec.market, JumpParams) else spec.market
    n_periods = base.n_periods
    if n_paths * n_periods > MAX_POOLED_PERIODS:
        raise ValueError(
            f"{n_paths} paths x {n_periods} periods exceeds the "
            f"{MAX_POOLED_PERIODS} pooled-period guard"
        )
    sigma_imp = (
        implied_vol if implied_vol is not None
        else model_expected_vol(spec.market) * (1.0 + spec.vol_premium)
    )
    if sigma_imp <= 0:
        raise ValueError("implied vol is not positive; cannot mark options")
    dt = 1.0 / base.periods_per_year
    tau = spec.tau_years
    remaining = tau - dt
    factors = _strike_factors(spec, sigma_imp)
    leg_f, leg_call, leg_w = _leg_arrays(spec, factors)

    # Per unit spot: inception value, delta, and the vega normalizer. Both
    # Black-Scholes prices and the strike grid are homogeneous in spot, so
    # these are constants of the whole simulation.
    vega_sum = float(np.sum(_vega_kernel(1.0, factors, sigma_imp, tau, 0.0)))
    v0_unit = float(np.sum(leg_w * _price_kernel(1.0, leg_f, sigma_imp, tau, 0.0, leg_call)))
    delta_unit = float(np.sum(leg_w * _delta_kernel(1.0, leg_f, sigma_imp, tau, 0.0, leg_call)))

    k = spec.hedge_every_periods
    rebalance_idx = (np.arange(n_periods) // k) * k
    chunks = []
    for i in range(n_paths):
        path_seed = derive_seed(seed, "path", i)
        if isinstance(spec.market, JumpParams):
            params = replace(spec.market, base=replace(base, seed=path_seed))
            series = gen_jump_diffusion(params, contract_id="underlying")
        else:
            params = replace(base, seed=path_seed)
            series = gen_gbm(params, contract_id="underlying")
        p = series.prices
        g = p[1:] / p[:-1]
        if remaining > 0:
            marks = _price_kernel(g[:, None], leg_f, sigma_imp, remaining, 0.0, leg_call)
        else:
            marks = _intrinsic_kernel(g[:, None], leg_f, leg_call)
        v1_unit = marks @ leg_w
        pnl = v0_unit - v1_unit
        if hedged:
            pnl = pnl + delta_unit * (p[1:] - p[:-1]) / p[:-1][rebalance_idx]
        chunks.append(pnl / vega_sum)

    pooled = np.concatenate(chunks)
    if label is None:
        label = f"strangle/{round(tau * 12, 6):g}m"
    out = PnlSeries(
        dates=daily_calendar(pooled.size),
        pnl=pooled,
        periods_per_year=base.periods_per_year,
        label=label,
    )
    if normalize:
        out = constant_risk_normalize(out)
    return HedgedPnl(pnl=out, spec=spec, label=label)


def constant_risk_normalize(pnl: PnlSeries) -> PnlSeries:
    """Rescale increments so realized annualized volatility is exactly 1."""
    if pnl.pnl.size < 2:
        raise ValueError("need at least 2 increments to normalize")
    sd = float(np.std(pnl.pnl, ddof=1))
    if sd == 0.0:
        raise DegenerateError("cannot normalize zero-variance pnl")
    scaled = pnl.pnl / (sd * np.sqrt(pnl.periods_per_year))
    return PnlSeries(
        dates=pnl.dates, pnl=scaled, periods_per_year=pnl.periods_per_year, label=pnl.label
    )


def sweep_maturities(
    base: StrangleSpec,
    taus: Sequence[float],
    markets: Sequence[tuple[str, GbmParams | JumpParams]],
    n_paths: int,
    seed: int,
    skew_estimator: SkewEstimator = SkewEstimator.PEARSON,
) -> list[tuple[str, StrategyStats]]:
    """Run the (maturity x market) grid and return labelled statistics.

    Labels have the form ``"<market>/<months>m"``; each cell derives its own
    sub-seed from ``seed`` and the label, so a single cell rerun in isolation
    reproduces its sweep result exactly.
    """
    out: list[tuple[str, StrategyStats]] = []
    for name, market in markets:
        for tau in taus:
            label = f"{name}/{round(tau * 12, 6):g}m"
            spec = replace(base, tau_years=tau, market=market)
            hedged = simulate_short_hedged(
                spec, n_paths, derive_seed(seed, label), label=label
            )
            out.append((label, stats_of(hedged.pnl, skew_estimator)))
    return out


def write_scatter_csv(rows: Sequence[tuple[str, StrategyStats]], path) -> None:
    """Emit ``label,market,tau_months,skew,sharpe`` rows for scatter plots."""
    import csv

    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "market", "tau_months", "skew", "sharpe"])
        for label, stats in rows:
            market, _, tau_part = label.rpartition("/")
            tau_months = tau_part[:-1] if tau_part.endswith("m") else tau_part
            writer.writerow(
                [label, market, tau_months, repr(stats.skew_low_moment), repr(stats.sharpe_annual)]
            )
