"""Expected-points forecasting, exact squad optimization and backtesting for FPL."""

from .backtest import (
    BacktestReport,
    StrategyRun,
    budget_sweep,
    run_rolling,
    run_static,
    score_week,
    similarity_matrix,
    weekly_uplift,
)
from .costs import CostVector, ForecastSpec, Method, build_cost_vector
from .errors import FplOptError, InfeasibleError
from .optimize import (
    FormationLimits,
    SelectionProblem,
    SquadSolution,
    brute_force_oracle,
    robust_coefficients,
    solve_bench,
    solve_squad,
    solve_xi,
    validate_squad,
)
from .panel import (
    Panel,
    PlayerPool,
    PlayerWeekRecord,
    availability,
    build_pool,
    load_panel,
    points_series,
    save_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "BacktestReport", "CostVector", "ForecastSpec", "FormationLimits", "FplOptError",
    "InfeasibleError", "Method", "Panel", "PlayerPool", "PlayerWeekRecord", "SelectionProblem",
    "SquadSolution", "StrategyRun", "availability", "brute_force_oracle", "budget_sweep",
    "build_cost_vector", "build_pool", "load_panel", "points_series", "robust_coefficients",
    "run_rolling", "run_static", "save_snapshot", "score_week", "similarity_matrix",
    "solve_bench", "solve_squad", "solve_xi", "validate_squad", "weekly_uplift",
]
