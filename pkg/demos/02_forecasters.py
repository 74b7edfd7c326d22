"""Every cost-vector estimator on one player's history, side by side.

    python demos/02_forecasters.py [path/to/merged_gw.csv]
"""
import sys

from fplopt.arima import arima_estimate
from fplopt.costs import ForecastSpec, Method, build_cost_vector
from fplopt.estimators import (
    bootstrap_estimate,
    holt_forecast,
    linear_trend_estimate,
    monte_carlo_estimate,
    simple_average,
    uncertainty_margin,
    weighted_average,
)
from fplopt.panel import load_panel, points_series
from fplopt.synth import synthetic_panel

panel = load_panel(sys.argv[1]) if len(sys.argv) > 1 else synthetic_panel(seed=1)
tau, n = panel.split_week, panel.season_length
horizon = n - tau

# pick a player with a full training history and decent output
pid = max(
    (p for p in panel.player_ids if len(points_series(panel, p, tau)) == tau),
    key=lambda p: sum(points_series(panel, p, tau)),
)
series = points_series(panel, pid, tau)
print(f"player {pid}: {tau}-week history, total {sum(series)} points")
print(f"history: {series}\n")

rows = [
    ("simple average", simple_average(series)),
    ("weighted average (recency)", weighted_average(series)),
    (f"Holt smoothing, mean of {horizon} steps", holt_forecast(series, horizon)),
    ("bootstrap, B=10000", bootstrap_estimate(series, horizon, 10_000, seed=1)),
    ("gaussian monte carlo, B=10000", monte_carlo_estimate(series, horizon, 10_000, seed=1)),
    ("ARIMA(1,0,0), mean forecast", arima_estimate(series, (1, 0, 0), horizon)[0]),
    ("ARIMA(0,0,1), mean forecast", arima_estimate(series, (0, 0, 1), horizon)[0]),
    ("linear trend, weeks 27..38", linear_trend_estimate(series, tau, n)),
]
for label, value in rows:
    print(f"  {label:38s} {value:7.3f}")
print(f"  {'uncertainty margin (sd of history)':38s} {uncertainty_margin(series):7.3f}")

# whole-pool cost vectors, including the feature-driven ones
print("\ncost vectors over the full pool (score for the same player):")
for method in (Method.WEIGHTED_AVG, Method.HYBRID_RIDGE, Method.ICT, Method.ROBUST_ICT,
               Method.INVOLVEMENT):
    cv = build_cost_vector(panel, ForecastSpec(method=method, horizon=horizon), tau + 1)
    note = " (unit interval by construction)" if method is Method.HYBRID_RIDGE else ""
    print(f"  {method.value:14s} -> {cv.scores.get(pid, float('nan')):8.4f}"
          f"  margin {cv.margins.get(pid, 0.0):6.3f}{note}")
