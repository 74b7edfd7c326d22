"""Replay squads against realized results: weekly scoring, strategies, sweeps.

Scoring follows the game's rules for a squad with no chips: the eleven
starters' realized points are summed, the captain counts twice, and starters
without a record that week are covered by bench players under the
substitution policy (goalkeepers only swap for goalkeepers; an insertion may
never break the formation bounds, and minima-deficit positions are repaired
first).  When the captain does not feature, the doubling moves to the
highest-expected available starter.
"""
from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import stats as sstats

from .costs import CostVector, ForecastSpec, build_cost_vector
from .errors import FplOptError
from .optimize import (
    DEFAULT_BUDGET,
    FormationLimits,
    SelectionProblem,
    SquadSolution,
    solve_squad,
    validate_squad,
)
from .panel import POSITIONS, Panel, availability, build_pool

log = logging.getLogger(__name__)

STATIC = "static"
ROLLING = "rolling"


@dataclass(frozen=True)
class Substitution:
    out_player: int
    in_player: int | None  # None: no legal substitute, the slot scored 0


@dataclass
class StrategyRun:
    label: str
    spec: ForecastSpec
    budget: float
    mode: str
    weekly_points: dict[int, int]
    cumulative: dict[int, int]
    squads: dict[int, SquadSolution]
    substitutions: dict[int, list[Substitution]] = field(default_factory=dict)
    resolve_failures: list[int] = field(default_factory=list)  # weeks that reused the prior squad

    @property
    def final_total(self) -> int:
        last = max(self.cumulative)
        return self.cumulative[last]

    def weekly_series(self) -> list[int]:
        return [self.weekly_points[gw] for gw in sorted(self.weekly_points)]


@dataclass
class BacktestReport:
    runs: list[StrategyRun]
    leaderboard: list[tuple[str, int]]
    winner_strip: dict[int, str] = field(default_factory=dict)
    similarity_labels: list[str] = field(default_factory=list)
    similarity: np.ndarray | None = None
    uplift: dict[str, list[int]] = field(default_factory=dict)
    benchmark_label: str | None = None


# -- weekly scoring ----------------------------------------------------------

def score_week(
    squad: SquadSolution,
    panel: Panel,
    gw: int,
    limits: FormationLimits | None = None,
) -> tuple[int, list[Substitution]]:
    """Realized team score for one gameweek, with the substitution log."""
    limits = limits or FormationLimits()
    pos_of = {pid: panel.position_of(pid) for pid in squad.squad if _known(panel, pid)}

    def pos(pid: int) -> str:
        return pos_of.get(pid, "MID")  # unknown ids only occur in hand-built fixtures

    effective = [p for p in squad.xi if availability(panel, p, gw)]
    absentees = sorted(
        (p for p in squad.xi if p not in effective),
        key=lambda p: (-squad.player_scores.get(p, 0.0), p),
    )
    counts = {k: 0 for k in POSITIONS}
    for p in effective:
        counts[pos(p)] += 1
    bench_pool = [p for p in squad.bench if availability(panel, p, gw)]
    subs: list[Substitution] = []

    for out in absentees:
        out_pos = pos(out)
        if out_pos == "GK":
            candidates = [b for b in bench_pool if pos(b) == "GK"]
        else:
            candidates = [b for b in bench_pool if pos(b) != "GK"]
        candidates = [b for b in candidates if counts[pos(b)] + 1 <= limits.max_limit[pos(b)]]
        # repair positions still under their minimum before spending subs elsewhere
        deficits = {k for k in POSITIONS if counts[k] < limits.min_limit[k]}
        if deficits & {pos(b) for b in candidates}:
            candidates = [b for b in candidates if pos(b) in deficits]
        if not candidates:
            subs.append(Substitution(out_player=out, in_player=None))
            continue
        pick = max(candidates, key=lambda b: (squad.player_scores.get(b, 0.0), -b))
        bench_pool.remove(pick)
        effective.append(pick)
        counts[pos(pick)] += 1
        subs.append(Substitution(out_player=out, in_player=pick))

    if not effective:
        log.info("score_week: squad entirely absent at gw %d, scoring 0", gw)
        return 0, subs

    points = {p: panel.record(p, gw).total_points for p in effective}
    if squad.captain in effective:
        doubled = squad.captain
    else:
        doubled = max(effective, key=lambda p: (squad.player_scores.get(p, 0.0), -p))
    return sum(points.values()) + points[doubled], subs


def _known(panel: Panel, pid: int) -> bool:
    try:
        panel.player_records(pid)
        return True
    except FplOptError:
        return False


# -- strategies ---------------------------------------------------------------

def run_static(
    panel: Panel,
    spec: ForecastSpec,
    budget: float = DEFAULT_BUDGET,
    *,
    robust: bool = False,
    label: str | None = None,
    time_budget: float = 10.0,
) -> StrategyRun:
    """One squad solved on the training window and held for every test week."""
    horizon = panel.season_length - panel.split_week
    spec = replace(spec, horizon=horizon)
    as_of = panel.split_week + 1
    cv = build_cost_vector(panel, spec, as_of)
    pool = build_pool(panel, as_of, cv.scores, cv.margins)
    problem = SelectionProblem(pool, budget=budget, robust=robust, time_budget=time_budget)
    solution = solve_squad(problem)
    _assert_valid(solution, pool, problem)
    run = StrategyRun(
        label=label or _default_label(spec, budget, STATIC, robust),
        spec=spec,
        budget=budget,
        mode=STATIC,
        weekly_points={},
        cumulative={},
        squads={},
    )
    total = 0
    for gw in range(panel.split_week + 1, panel.season_length + 1):
        pts, subs = score_week(solution, panel, gw)
        total += pts
        run.weekly_points[gw] = pts
        run.cumulative[gw] = total
        run.squads[gw] = solution
        run.substitutions[gw] = subs
    return run


def run_rolling(
    panel: Panel,
    spec: ForecastSpec,
    budget: float = DEFAULT_BUDGET,
    *,
    robust: bool = False,
    label: str | None = None,
    time_budget: float = 10.0,
) -> StrategyRun:
    """Re-forecast from weeks < t and re-solve XI + bench at week-t prices."""
    spec = replace(spec, horizon=1)
    run = StrategyRun(
        label=label or _default_label(spec, budget, ROLLING, robust),
        spec=spec,
        budget=budget,
        mode=ROLLING,
        weekly_points={},
        cumulative={},
        squads={},
    )
    total = 0
    solution: SquadSolution | None = None
    for gw in range(panel.split_week + 1, panel.season_length + 1):
        try:
            cv = build_cost_vector(panel, spec, gw)
            pool = build_pool(panel, gw, cv.scores, cv.margins)
            problem = SelectionProblem(pool, budget=budget, robust=robust, time_budget=time_budget)
            solution = solve_squad(problem)
            _assert_valid(solution, pool, problem)
        except FplOptError as exc:
            if solution is None:
                raise
            log.warning("rolling week %d failed (%s); reusing previous squad", gw, exc)
            run.resolve_failures.append(gw)
        pts, subs = score_week(solution, panel, gw)
        total += pts
        run.weekly_points[gw] = pts
        run.cumulative[gw] = total
        run.squads[gw] = solution
        run.substitutions[gw] = subs
    return run


def _assert_valid(solution: SquadSolution, pool, problem: SelectionProblem) -> None:
    violations = validate_squad(solution, pool, problem)
    if violations:  # a solver bug, not a data condition: never degrade silently
        raise RuntimeError(f"solver produced an illegal squad: {violations}")


def _default_label(spec: ForecastSpec, budget: float, mode: str, robust: bool) -> str:
    parts = [spec.label()]
    if robust:
        parts.insert(0, "robust")
    if mode == ROLLING:
        parts.append("rolling")
    if budget != DEFAULT_BUDGET:
        parts.append(f"b{budget:g}")
    return " ".join(parts)


def budget_sweep(
    panel: Panel,
    spec: ForecastSpec,
    budgets: list[float],
    mode: str = STATIC,
    *,
    robust: bool = False,
    include_base: bool = True,
    time_budget: float = 10.0,
) -> BacktestReport:
    """One run per budget (plus the base budget) and the weekly winner strip.

    Winner ties break toward the lower budget.
    """
    if not budgets:
        raise ValueError("budgets must be non-empty")
    grid = set(budgets)
    if include_base:
        grid.add(DEFAULT_BUDGET)
    grid = sorted(grid)  # ascending, so winner ties resolve toward the lower budget
    runner = run_static if mode == STATIC else run_rolling
    runs = []
    for b in grid:
        label = "base" if b == DEFAULT_BUDGET else f"£{b:g}"
        runs.append(runner(panel, spec, b, robust=robust, label=label, time_budget=time_budget))
    winner_strip: dict[int, str] = {}
    for gw in sorted(runs[0].weekly_points):
        best = max(runs, key=lambda r: r.weekly_points[gw])  # max keeps the first (lowest budget) on ties
        winner_strip[gw] = best.label
    return make_report(runs, winner_strip=winner_strip)


# -- cross-run analytics ------------------------------------------------------

def similarity_matrix(runs: list[StrategyRun]) -> tuple[list[str], np.ndarray]:
    """Pairwise |Spearman rho| between weekly score series (average-rank ties).

    A pair with a constant series has undefined rank correlation and is
    recorded as NaN, never coerced to 0.  Diagonal is exactly 1.
    """
    if len(runs) < 2:
        raise ValueError("similarity needs at least two runs")
    series = [r.weekly_series() for r in runs]
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise ValueError("weekly series lengths differ across runs")
    n = len(runs)
    matrix = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            if len(set(series[i])) == 1 or len(set(series[j])) == 1:
                rho = float("nan")
            else:
                rho, _ = sstats.spearmanr(series[i], series[j])
            matrix[i, j] = matrix[j, i] = abs(rho) if math.isfinite(rho) else float("nan")
    return [r.label for r in runs], matrix


def weekly_uplift(run: StrategyRun, benchmark: StrategyRun) -> list[int]:
    """Per-week score difference run - benchmark over the aligned test weeks."""
    weeks = sorted(run.weekly_points)
    if weeks != sorted(benchmark.weekly_points):
        raise ValueError("runs cover different test weeks")
    return [run.weekly_points[gw] - benchmark.weekly_points[gw] for gw in weeks]


def make_report(
    runs: list[StrategyRun],
    benchmark_label: str | None = None,
    winner_strip: dict[int, str] | None = None,
) -> BacktestReport:
    leaderboard = sorted(((r.label, r.final_total) for r in runs), key=lambda t: (-t[1], t[0]))
    report = BacktestReport(
        runs=runs,
        leaderboard=leaderboard,
        winner_strip=winner_strip or {},
        benchmark_label=benchmark_label,
    )
    if len(runs) >= 2:
        report.similarity_labels, report.similarity = similarity_matrix(runs)
    if benchmark_label is not None:
        benchmark = next(r for r in runs if r.label == benchmark_label)
        report.uplift = {r.label: weekly_uplift(r, benchmark) for r in runs if r.label != benchmark_label}
    return report


# -- persistence --------------------------------------------------------------

def slug_label(label: str) -> str:
    """Filesystem-safe rendering of a run label."""
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_") or "run"


def write_report(report: BacktestReport, out_dir: str | Path) -> Path:
    """Diffable text bundle plus a machine-readable summary.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs_dir = out / "runs"
    runs_dir.mkdir(exist_ok=True)
    for run in report.runs:
        lines = ["gw,weekly_points,cumulative"]
        for gw in sorted(run.weekly_points):
            lines.append(f"{gw},{run.weekly_points[gw]},{run.cumulative[gw]}")
        (runs_dir / f"{slug_label(run.label)}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    lines = ["label,final_total"]
    lines += [f"{label},{total}" for label, total in report.leaderboard]
    (out / "leaderboard.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if report.winner_strip:
        lines = ["gw,winner"]
        lines += [f"{gw},{report.winner_strip[gw]}" for gw in sorted(report.winner_strip)]
        (out / "winner_strip.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if report.similarity is not None:
        header = "label," + ",".join(report.similarity_labels)
        lines = [header]
        for i, lab in enumerate(report.similarity_labels):
            cells = ",".join(
                "" if not math.isfinite(report.similarity[i, j]) else f"{report.similarity[i, j]:.4f}"
                for j in range(len(report.similarity_labels))
            )
            lines.append(f"{lab},{cells}")
        (out / "similarity.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if report.uplift:
        lines = ["label,gw,delta"]
        weeks = sorted(report.runs[0].weekly_points)
        for label in sorted(report.uplift):
            for gw, delta in zip(weeks, report.uplift[label]):
                lines.append(f"{label},{gw},{delta}")
        (out / "uplift.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "summary.json").write_text(report_summary_json(report), encoding="utf-8")
    return out


def report_summary_json(report: BacktestReport) -> str:
    payload = {
        "benchmark_label": report.benchmark_label,
        "leaderboard": [{"label": label, "final_total": total} for label, total in report.leaderboard],
        "winner_strip": {str(gw): w for gw, w in sorted(report.winner_strip.items())},
        "runs": [
            {
                "label": r.label,
                "mode": r.mode,
                "budget": r.budget,
                "method": r.spec.label(),
                "seed": r.spec.seed,
                "final_total": r.final_total,
                "weekly_points": {str(gw): r.weekly_points[gw] for gw in sorted(r.weekly_points)},
                "resolve_failures": r.resolve_failures,
            }
            for r in report.runs
        ],
        "similarity": None
        if report.similarity is None
        else {
            "labels": report.similarity_labels,
            "matrix": [
                [None if not math.isfinite(v) else round(float(v), 4) for v in row]
                for row in report.similarity
            ],
        },
        "uplift": report.uplift,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
