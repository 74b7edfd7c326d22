"""Low-order ARIMA(p,d,q) with intercept, fitted by conditional sum of squares.

CSS conditions on the first p observations of the (d-times differenced)
series and sets pre-sample shocks to zero.  Pure AR models reduce to ordinary
least squares and are solved in closed form; models with MA terms refine the
OLS start with a derivative-free search.  Multi-step forecasts iterate the
recursion with future shocks at zero and are integrated back to levels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import FplOptError
from .estimators import simple_average

_STATIONARITY_MARGIN = 1.001
_PENALTY = 1e12


class ArimaFitError(FplOptError):
    """Fit failed (too short, non-convergent, or non-stationary)."""


@dataclass
class ArimaFit:
    order: tuple[int, int, int]
    intercept: float
    ar: np.ndarray
    ma: np.ndarray
    resid: np.ndarray  # CSS residuals on the differenced series
    css: float


def _css_residuals(z: np.ndarray, c: float, ar: np.ndarray, ma: np.ndarray) -> np.ndarray:
    p, q = len(ar), len(ma)
    n = len(z)
    eps = np.zeros(n)
    for t in range(p, n):
        pred = c
        for i in range(p):
            pred += ar[i] * z[t - 1 - i]
        for j in range(q):
            k = t - 1 - j
            if k >= 0:
                pred += ma[j] * eps[k]
        eps[t] = z[t] - pred
    return eps


def _ar_roots_stationary(ar: np.ndarray) -> bool:
    if len(ar) == 0:
        return True
    # AR polynomial 1 - ar1*B - ... - arp*B^p; stationary iff roots outside unit circle
    coeffs = np.concatenate([-ar[::-1], [1.0]])
    roots = np.roots(coeffs)
    return bool(np.all(np.abs(roots) > _STATIONARITY_MARGIN))


def _ols_ar(z: np.ndarray, p: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Closed-form CSS for a pure AR(p) with intercept."""
    if p == 0:
        c = float(np.mean(z))
        return c, np.empty(0), z - c
    rows = len(z) - p
    design = np.ones((rows, p + 1))
    for i in range(p):
        design[:, 1 + i] = z[p - 1 - i : len(z) - 1 - i]
    target = z[p:]
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    eps = np.zeros(len(z))
    eps[p:] = target - design @ coef
    return float(coef[0]), coef[1:], eps


def fit_arima(series: list[float], order: tuple[int, int, int]) -> ArimaFit:
    p, d, q = order
    if min(p, d, q) < 0 or max(p, q) > 2 or d > 2:
        raise ValueError(f"unsupported order {order}")
    x = np.asarray(series, dtype=float)
    if len(x) < p + d + q + 2:
        raise ArimaFitError(f"series length {len(x)} too short for ARIMA{order}")
    z = np.diff(x, n=d) if d else x.copy()

    c0, ar0, eps0 = _ols_ar(z, p)
    if q == 0:
        ar, c, eps, ma = ar0, c0, eps0, np.empty(0)
        css = float(np.sum(eps[p:] ** 2))
    else:
        def objective(params: np.ndarray) -> float:
            c_, ar_, ma_ = params[0], params[1 : 1 + p], params[1 + p :]
            if (p and np.max(np.abs(ar_)) > 5.0) or np.max(np.abs(ma_), initial=0.0) > 5.0:
                return _PENALTY
            eps_ = _css_residuals(z, c_, ar_, ma_)
            val = float(np.sum(eps_[p:] ** 2))
            return val if np.isfinite(val) else _PENALTY

        start = np.concatenate([[c0], ar0, np.zeros(q)])
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-6, "fatol": 1e-8, "maxiter": 300 * len(start)},
        )
        if not np.all(np.isfinite(res.x)) or res.fun >= _PENALTY:
            raise ArimaFitError(f"CSS search failed for ARIMA{order}")
        c = float(res.x[0])
        ar = res.x[1 : 1 + p]
        ma = res.x[1 + p :]
        eps = _css_residuals(z, c, ar, ma)
        css = float(res.fun)
    if not _ar_roots_stationary(ar):
        raise ArimaFitError(f"non-stationary AR fit for ARIMA{order}")
    if not np.isfinite(css):
        raise ArimaFitError(f"non-finite CSS for ARIMA{order}")
    return ArimaFit(order=(p, d, q), intercept=c, ar=ar, ma=ma, resid=eps, css=css)


def forecast_arima(fit: ArimaFit, series: list[float], horizon: int) -> np.ndarray:
    """Level forecasts for the next ``horizon`` weeks (future shocks zero)."""
    p, d, q = fit.order
    x = np.asarray(series, dtype=float)
    z = np.diff(x, n=d) if d else x.copy()
    hist = list(z)
    res = list(fit.resid)
    out = np.empty(horizon)
    for h in range(horizon):
        pred = fit.intercept
        for i in range(p):
            pred += fit.ar[i] * hist[-1 - i]
        for j in range(q):
            pred += fit.ma[j] * res[-1 - j]
        hist.append(pred)
        res.append(0.0)
        out[h] = pred
    # integrate the differenced forecasts back to levels
    for k in range(d, 0, -1):
        tail = np.diff(x, n=k - 1)
        out = np.cumsum(out) + tail[-1]
    return out


def arima_estimate(series: list[float], order: tuple[int, int, int], horizon: int) -> tuple[float, bool]:
    """Mean of the multi-step forecasts, or the series mean on fit failure.

    Returns (estimate, fell_back).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    try:
        fit = fit_arima(series, order)
        forecasts = forecast_arima(fit, series, horizon)
        if not np.all(np.isfinite(forecasts)):
            raise ArimaFitError("non-finite forecasts")
        return float(np.mean(forecasts)), False
    except ArimaFitError:
        return simple_average(series), True
