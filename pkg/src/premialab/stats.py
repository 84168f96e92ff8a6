"""Strategy statistics and the Sharpe-versus-skewness regression.

Sharpe ratios are annualized from raw per-period increments (risk-unit
streams, no risk-free leg). Two skewness estimators are provided besides the
standard third-moment one: Pearson median skewness (the default low-moment
choice) and the L-moment ratio tau3, both far less tail-sensitive than third
powers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateError
from .series import PnlSeries

__all__ = [
    "SkewEstimator",
    "StrategyStats",
    "RegressionFit",
    "sharpe_annualized",
    "skew_third_moment",
    "skew_low_moment",
    "max_drawdown",
    "fit_sr_vs_skew",
    "stats_of",
    "stats_to_dict",
    "fit_to_dict",
]


class SkewEstimator(enum.Enum):
    PEARSON = "pearson"
    L_MOMENT = "l-moment"
    THIRD_MOMENT = "third-moment"


@dataclass(frozen=True)
class StrategyStats:
    """The coordinates of one strategy point: Sharpe, vol, both skews."""

    sharpe_annual: float
    vol_annual: float
    skew_low_moment: float
    skew_third_moment: float
    max_drawdown: float
    n_periods: int


@dataclass(frozen=True)
class RegressionFit:
    """OLS fit reported in the form ``SR = a - b * zeta``."""

    a: float
    b: float
    stderr_a: float
    stderr_b: float
    r_squared: float
    n_points: int


def _std(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1))


def sharpe_annualized(pnl: PnlSeries) -> float:
    """Annualized Sharpe: per-period mean over sample std, times sqrt(ppy)."""
    x = pnl.pnl
    if x.size < 2:
        raise ValueError("sharpe needs at least 2 increments")
    sd = _std(x)
    if sd == 0.0:
        raise DegenerateError("sharpe undefined: zero variance")
    return float(np.mean(x)) / sd * np.sqrt(pnl.periods_per_year)


def _third_moment_skew(x: np.ndarray) -> float:
    n = x.size
    if n < 3:
        raise ValueError("third-moment skewness needs at least 3 increments")
    sd = _std(x)
    if sd == 0.0:
        raise DegenerateError("skewness undefined: zero variance")
    m3 = float(np.mean((x - np.mean(x)) ** 3))
    return n * n / ((n - 1.0) * (n - 2.0)) * m3 / sd**3


def skew_third_moment(pnl: PnlSeries) -> float:
    """Standard bias-corrected third-moment skewness (n^2/((n-1)(n-2)) m3/s^3)."""
    return _third_moment_skew(pnl.pnl)


def _pearson_skew(x: np.ndarray) -> float:
    sd = _std(x)
    if sd == 0.0:
        raise DegenerateError("skewness undefined: zero variance")
    return 3.0 * (float(np.mean(x)) - float(np.median(x))) / sd


def _l_moment_skew(x: np.ndarray) -> float:
    # Unbiased sample L-moments via order statistics; tau3 = lambda3/lambda2.
    n = x.size
    xs = np.sort(x)
    j = np.arange(n, dtype=np.float64)
    b0 = float(np.mean(xs))
    b1 = float(np.sum(j * xs)) / (n * (n - 1.0))
    b2 = float(np.sum(j * (j - 1.0) * xs)) / (n * (n - 1.0) * (n - 2.0))
    l2 = 2.0 * b1 - b0
    l3 = 6.0 * b2 - 6.0 * b1 + b0
    if l2 == 0.0:
        raise DegenerateError("skewness undefined: zero dispersion")
    return l3 / l2


def skew_low_moment(pnl: PnlSeries, estimator: SkewEstimator = SkewEstimator.PEARSON) -> float:
    """Low-moment skewness of the increments.

    Default is Pearson median skewness ``3 (mean - median) / std`` (even-length
    medians use the midpoint convention); ``L_MOMENT`` selects the L-skewness
    ratio and ``THIRD_MOMENT`` falls through to the standard estimator.
    """
    x = pnl.pnl
    if x.size < 3:
        raise ValueError("skewness needs at least 3 increments")
    if estimator is SkewEstimator.PEARSON:
        return _pearson_skew(x)
    if estimator is SkewEstimator.L_MOMENT:
        return _l_moment_skew(x)
    return _third_moment_skew(x)


def max_drawdown(pnl: PnlSeries) -> float:
    """Largest peak-to-trough decline of cumulative P&L (flat start counts)."""
    if pnl.pnl.size < 1:
        raise ValueError("max_drawdown needs at least 1 increment")
    cum = np.concatenate(([0.0], np.cumsum(pnl.pnl)))
    return float(np.max(np.maximum.accumulate(cum) - cum))


def fit_sr_vs_skew(points: Sequence[tuple[float, float]]) -> RegressionFit:
    """OLS of Sharpe on skewness, reported as ``SR = a - b * zeta``.

    ``b`` is the negated slope, so a positive ``b`` means more negative
    skewness earns a higher Sharpe. Standard errors are the classical
    homoskedastic ones (defined as 0 for a two-point exact fit).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (skew, sharpe) pairs")
    n = pts.shape[0]
    if n < 2:
        raise ValueError("regression needs at least 2 points")
    zeta, sr = pts[:, 0], pts[:, 1]
    zbar, sbar = float(np.mean(zeta)), float(np.mean(sr))
    dz = zeta - zbar
    sxx = float(np.sum(dz * dz))
    if sxx == 0.0:
        raise DegenerateError("regression undefined: all skew values equal")
    slope = float(np.sum(dz * (sr - sbar))) / sxx
    intercept = sbar - slope * zbar
    resid = sr - (intercept + slope * zeta)
    ssr = float(np.sum(resid * resid))
    sst = float(np.sum((sr - sbar) ** 2))
    if n > 2:
        s2 = ssr / (n - 2)
        stderr_slope = np.sqrt(s2 / sxx)
        stderr_intercept = np.sqrt(s2 * (1.0 / n + zbar * zbar / sxx))
    else:
        stderr_slope = stderr_intercept = 0.0
    r2 = 1.0 if sst == 0.0 else 1.0 - ssr / sst
    return RegressionFit(
        a=intercept,
        b=-slope,
        stderr_a=float(stderr_intercept),
        stderr_b=float(stderr_slope),
        r_squared=float(min(1.0, max(0.0, r2))),
        n_points=n,
    )


def stats_of(pnl: PnlSeries, skew_estimator: SkewEstimator = SkewEstimator.PEARSON) -> StrategyStats:
    """Bundle Sharpe, vol, both skewness estimates and drawdown."""
    x = pnl.pnl
    if x.size < 3:
        raise ValueError("stats_of needs at least 3 increments")
    sd = _std(x)
    if sd == 0.0:
        raise DegenerateError("stats undefined: zero variance")
    return StrategyStats(
        sharpe_annual=sharpe_annualized(pnl),
        vol_annual=sd * float(np.sqrt(pnl.periods_per_year)),
        skew_low_moment=skew_low_moment(pnl, skew_estimator),
        skew_third_moment=skew_third_moment(pnl),
        max_drawdown=max_drawdown(pnl),
        n_periods=int(x.size),
    )


def stats_to_dict(s: StrategyStats) -> dict:
    """JSON-ready mapping; key order is part of the output contract."""
    return {
        "sharpe_annual": s.sharpe_annual,
        "vol_annual": s.vol_annual,
        "skew_low": s.skew_low_moment,
        "skew_third": s.skew_third_moment,
        "max_dd": s.max_drawdown,
        "n_periods": s.n_periods,
    }


def fit_to_dict(f: RegressionFit) -> dict:
    """JSON-ready mapping; key order is part of the output contract."""
    return {
        "a": f.a,
        "b": f.b,
        "stderr_a": f.stderr_a,
        "stderr_b": f.stderr_b,
        "r2": f.r_squared,
        "n_points": f.n_points,
    }
