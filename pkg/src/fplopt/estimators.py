"""History-only expected-points estimators.

Every function consumes a player's past weekly points and returns one scalar
summary of expected future performance.  All are pure; the simulation-based
ones are deterministic for a fixed seed.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NoHistoryError

HOLT_GRID_STEP = 0.01  # grid resolution for the (alpha, beta) search


def simple_average(series: list[float]) -> float:
    """Mean of the observed weeks, all weighted equally."""
    if not series:
        raise NoHistoryError("simple_average: empty series")
    return math.fsum(series) / len(series)


def weighted_average(series: list[float]) -> float:
    """Linearly recency-weighted mean: week t gets weight t / sum(1..n)."""
    if not series:
        raise NoHistoryError("weighted_average: empty series")
    n = len(series)
    denom = n * (n + 1) / 2
    return math.fsum((t + 1) * p for t, p in enumerate(series)) / denom


def _holt_forecasts(series: np.ndarray, alpha: float, beta: float, horizon: int) -> np.ndarray:
    level = series[0]
    trend = series[1] - series[0]
    for t in range(1, len(series)):
        prev_level = level
        level = alpha * series[t] + (1 - alpha) * (level + trend)
        trend = beta * (level - prev_level) + (1 - beta) * trend
    return level + trend * np.arange(1, horizon + 1)


def holt_fit(series: list[float]) -> tuple[float, float]:
    """Grid-search (alpha, beta) minimizing one-step squared error.

    Ties break toward smaller alpha, then smaller beta, so the fit is
    reproducible.  Initialization: level = p1, trend = p2 - p1.
    """
    x = np.asarray(series, dtype=float)
    if len(x) < 2:
        raise ValueError("holt_fit needs at least 2 observations")
    steps = int(round(1 / HOLT_GRID_STEP)) + 1
    alphas = np.linspace(0.0, 1.0, steps)
    betas = np.linspace(0.0, 1.0, steps)
    a = alphas[:, None]  # (A, 1)
    b = betas[None, :]  # (1, B)
    level = np.full((steps, steps), x[0])
    trend = np.full((steps, steps), x[1] - x[0])
    sse = np.zeros((steps, steps))
    for t in range(1, len(x)):
        pred = level + trend
        sse += (x[t] - pred) ** 2
        new_level = a * x[t] + (1 - a) * pred
        trend = b * (new_level - level) + (1 - b) * trend
        level = new_level
    # argmin scans alpha-major then beta, matching the tie-break order
    flat = int(np.argmin(sse))
    return float(alphas[flat // steps]), float(betas[flat % steps])


def holt_forecast(series: list[float], horizon: int) -> float:
    """Mean of the next ``horizon`` level-plus-trend forecasts.

    Series shorter than 2 fall back to the simple average (logged by callers
    via the fallback flag).
    """
    if not series:
        raise NoHistoryError("holt_forecast: empty series")
    if len(series) < 2:
        return simple_average(series)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    alpha, beta = holt_fit(series)
    forecasts = _holt_forecasts(np.asarray(series, dtype=float), alpha, beta, horizon)
    return float(np.mean(forecasts))


def bootstrap_estimate(series: list[float], horizon: int, resamples: int, seed: int) -> float:
    """Resample ``resamples`` future paths of length ``horizon`` with replacement
    and average within, then across, the paths."""
    if not series:
        raise NoHistoryError("bootstrap_estimate: empty series")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    rng = np.random.default_rng(seed)
    draws = rng.choice(np.asarray(series, dtype=float), size=(resamples, horizon), replace=True)
    return float(draws.mean())


def monte_carlo_estimate(series: list[float], horizon: int, resamples: int, seed: int) -> float:
    """Parametric twin of the bootstrap: i.i.d. Gaussian paths with the
    sample mean and variance.  One observation degenerates to the mean."""
    if not series:
        raise NoHistoryError("monte_carlo_estimate: empty series")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    mean = float(np.mean(series))
    sd = float(np.std(series, ddof=1)) if len(series) >= 2 else 0.0
    if sd == 0.0:
        return mean
    rng = np.random.default_rng(seed)
    draws = rng.normal(mean, sd, size=(resamples, horizon))
    return float(draws.mean())


def linear_trend_estimate(series: list[float], split_week: int, season_length: int) -> float:
    """OLS of points on week index, averaged over predicted weeks
    split_week+1..season_length.

    Equals b0 + b1 * (split_week + 1 + season_length) / 2.
    """
    if not series:
        raise NoHistoryError("linear_trend_estimate: empty series")
    if len(series) == 1:
        return float(series[0])
    y = np.asarray(series, dtype=float)
    x = np.arange(1, len(y) + 1, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    mid = (split_week + 1 + season_length) / 2.0
    return float(intercept + slope * mid)


def uncertainty_margin(series: list[float]) -> float:
    """Sample standard deviation (ddof=1) of past points; 0 for length 1."""
    if not series:
        raise NoHistoryError("uncertainty_margin: empty series")
    if len(series) < 2:
        return 0.0
    return float(np.std(np.asarray(series, dtype=float), ddof=1))
