"""Turn training history into a per-player cost vector for the optimizer."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import estimators
from .arima import arima_estimate
from .errors import EmptyPoolError
from .hybrid import hybrid_score, min_max_normalize, ridge_fit
from .panel import FEATURE_FIELDS, POSITIONS, Panel, points_series

log = logging.getLogger(__name__)


class Method(str, Enum):
    SIMPLE_AVG = "simple_avg"
    WEIGHTED_AVG = "weighted_avg"
    EXP_SMOOTH = "exp_smooth"
    BOOTSTRAP = "bootstrap"
    MONTE_CARLO = "monte_carlo"
    ARIMA = "arima"
    LINEAR_TREND = "linear_trend"
    HYBRID_RIDGE = "hybrid_ridge"
    ICT = "ict"
    ROBUST_ICT = "robust_ict"
    INVOLVEMENT = "involvement"


_SERIES_METHODS = {
    Method.SIMPLE_AVG, Method.WEIGHTED_AVG, Method.EXP_SMOOTH, Method.BOOTSTRAP,
    Method.MONTE_CARLO, Method.ARIMA, Method.LINEAR_TREND,
}
_SIMULATION_METHODS = {Method.BOOTSTRAP, Method.MONTE_CARLO}


@dataclass(frozen=True)
class ForecastSpec:
    """Which estimator produces the cost vector, and with what parameters."""

    method: Method
    arima_order: tuple[int, int, int] = (1, 0, 0)
    horizon: int = 12  # weeks summarized by multi-step forecasters
    resamples: int = 10_000
    seed: int = 20240526
    ridge_alpha: float = 1.0
    hybrid_lambda: float = 2 / 3
    hybrid_base: Method = Method.SIMPLE_AVG  # fills the realized slot of the blend

    def __post_init__(self):
        if self.method in _SIMULATION_METHODS and self.resamples < 1:
            raise ValueError("simulation methods need resamples >= 1")
        if not 0.0 <= self.hybrid_lambda <= 1.0:
            raise ValueError("hybrid_lambda must lie in [0, 1]")
        if self.ridge_alpha < 0:
            raise ValueError("ridge_alpha must be >= 0")
        if any(not 0 <= v <= 2 for v in self.arima_order):
            raise ValueError("arima_order components must lie in [0, 2]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.hybrid_base == Method.HYBRID_RIDGE:
            raise ValueError("hybrid_base must be a non-hybrid method")

    def label(self) -> str:
        if self.method is Method.ARIMA:
            p, d, q = self.arima_order
            return f"arima({p},{d},{q})"
        if self.method is Method.HYBRID_RIDGE:
            num = round(self.hybrid_lambda / (1 - self.hybrid_lambda)) if self.hybrid_lambda < 1 else "inf"
            return f"hybrid_{self.hybrid_base.value}_1:{num}"
        return self.method.value


@dataclass(frozen=True)
class CostVector:
    scores: dict[int, float]
    margins: dict[int, float]
    spec: ForecastSpec
    as_of_week: int
    fallbacks: frozenset[int] = field(default_factory=frozenset)


def player_seed(base_seed: int, player_id: int) -> int:
    """Stable per-player stream so parallel fan-out is schedule-independent."""
    digest = hashlib.blake2b(str(player_id).encode(), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "big")) & (2**64 - 1)


def _pooled_ids(panel: Panel, history_week: int) -> list[int]:
    return [pid for pid in panel.player_ids if panel.player_records(pid)[0].gw <= history_week]


def _series_estimate(spec: ForecastSpec, series: list[int], pid: int) -> tuple[float, bool]:
    method = spec.method if spec.method in _SERIES_METHODS else spec.hybrid_base
    if method is Method.SIMPLE_AVG:
        return estimators.simple_average(series), False
    if method is Method.WEIGHTED_AVG:
        return estimators.weighted_average(series), False
    if method is Method.EXP_SMOOTH:
        if len(series) < 2:
            return estimators.simple_average(series), True
        return estimators.holt_forecast(series, spec.horizon), False
    if method is Method.BOOTSTRAP:
        return estimators.bootstrap_estimate(series, spec.horizon, spec.resamples, player_seed(spec.seed, pid)), False
    if method is Method.MONTE_CARLO:
        return estimators.monte_carlo_estimate(series, spec.horizon, spec.resamples, player_seed(spec.seed, pid)), False
    if method is Method.ARIMA:
        return arima_estimate(series, spec.arima_order, spec.horizon)
    if method is Method.LINEAR_TREND:
        # predict the next `horizon` week indexes after the observed window
        return estimators.linear_trend_estimate(series, len(series), len(series) + spec.horizon), False
    raise ValueError(f"{method} is not a series method")


def build_cost_vector(panel: Panel, spec: ForecastSpec, as_of_week: int) -> CostVector:
    """Score every pooled player using history strictly before ``as_of_week``.

    Static runs pass as_of_week = split_week + 1 (history = the training
    window); rolling runs pass the target week itself, so causality holds by
    construction.  Players without history are dropped; a player whose fit
    fell back to the mean is flagged.
    """
    if as_of_week < 2:
        raise ValueError("as_of_week must be >= 2 (needs at least one prior week)")
    history_week = min(as_of_week - 1, panel.season_length)
    scores: dict[int, float] = {}
    margins: dict[int, float] = {}
    fallbacks: set[int] = set()

    if spec.method in _SERIES_METHODS:
        for pid in _pooled_ids(panel, history_week):
            series = points_series(panel, pid, history_week)
            if not series:
                continue
            value, fell_back = _series_estimate(spec, series, pid)
            if not math.isfinite(value):
                value, fell_back = estimators.simple_average(series), True
            scores[pid] = value
            margins[pid] = estimators.uncertainty_margin(series)
            if fell_back:
                fallbacks.add(pid)
    elif spec.method in (Method.ICT, Method.ROBUST_ICT):
        for pid in _pooled_ids(panel, history_week):
            ict = panel.feature_series(pid, "ict_index", history_week)
            if not ict:
                continue
            mean = float(np.mean(ict))
            sd = float(np.std(ict, ddof=1)) if len(ict) >= 2 else 0.0
            if spec.method is Method.ICT:
                scores[pid] = mean
                margins[pid] = 0.0
            else:
                scores[pid] = mean - sd
                margins[pid] = sd
    elif spec.method is Method.INVOLVEMENT:
        aggregates = panel.feature_aggregates(history_week)
        for pid in _pooled_ids(panel, history_week):
            if pid not in aggregates:
                continue
            scores[pid] = aggregates[pid]["xgi"] - aggregates[pid]["xgc"]
            margins[pid] = 0.0
    elif spec.method is Method.HYBRID_RIDGE:
        scores, fallbacks = _hybrid_scores(panel, spec, history_week)
        margins = {pid: 0.0 for pid in scores}
    else:
        raise ValueError(f"unknown method {spec.method}")

    if not scores:
        raise EmptyPoolError(f"no player could be scored as of week {as_of_week}")
    return CostVector(scores=scores, margins=margins, spec=spec, as_of_week=as_of_week,
                      fallbacks=frozenset(fallbacks))


def _hybrid_scores(panel: Panel, spec: ForecastSpec, history_week: int) -> tuple[dict[int, float], set[int]]:
    """Blend the normalized realized score with a per-position ridge prediction."""
    aggregates = panel.feature_aggregates(history_week)
    pids, realized, rows, positions = [], [], [], []
    fallbacks: set[int] = set()
    for pid in _pooled_ids(panel, history_week):
        series = points_series(panel, pid, history_week)
        if not series or pid not in aggregates:
            continue
        base, fell_back = _series_estimate(spec, series, pid)
        if not math.isfinite(base):
            base, fell_back = estimators.simple_average(series), True
        if fell_back:
            fallbacks.add(pid)
        pids.append(pid)
        realized.append(base)
        rows.append([aggregates[pid][f] for f in FEATURE_FIELDS])
        positions.append(panel.position_of(pid))
    features = np.asarray(rows, dtype=float)
    mean_points = np.array(
        [estimators.simple_average(points_series(panel, pid, history_week)) for pid in pids]
    )
    predicted = np.zeros(len(pids))
    for pos in POSITIONS:
        members = [i for i, p in enumerate(positions) if p == pos]
        if not members:
            continue
        idx = np.array(members)
        model = ridge_fit(features[idx], mean_points[idx], spec.ridge_alpha)
        predicted[idx] = model.predict(features[idx])
    realized_norm = min_max_normalize(np.asarray(realized))
    predicted_norm = min_max_normalize(predicted)
    blend = spec.hybrid_lambda
    return (
        {pid: hybrid_score(realized_norm[i], predicted_norm[i], blend) for i, pid in enumerate(pids)},
        fallbacks,
    )


def save_cost_vector(cv: CostVector, path: str | Path) -> None:
    """Columnar text artifact: one scored player per row."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["player_id", "method", "as_of_week", "score", "margin", "fallback_flag", "seed"])
        for pid in sorted(cv.scores):
            writer.writerow([
                pid, cv.spec.label(), cv.as_of_week, f"{cv.scores[pid]:.4f}",
                f"{cv.margins.get(pid, 0.0):.4f}", int(pid in cv.fallbacks), cv.spec.seed,
            ])
