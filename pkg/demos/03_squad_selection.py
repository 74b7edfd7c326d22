"""Exact squad selection: XI + captain + bench, what-ifs, robust variant.

    python demos/03_squad_selection.py [path/to/merged_gw.csv]
"""
import sys

from fplopt.costs import ForecastSpec, Method, build_cost_vector
from fplopt.optimize import (
    SelectionProblem,
    brute_force_oracle,
    format_solution,
    solve_squad,
    validate_squad,
)
from fplopt.panel import build_pool, load_panel
from fplopt.synth import synthetic_panel

panel = load_panel(sys.argv[1]) if len(sys.argv) > 1 else synthetic_panel(seed=1)
gw = panel.split_week + 1

spec = ForecastSpec(method=Method.WEIGHTED_AVG, horizon=panel.season_length - panel.split_week)
cv = build_cost_vector(panel, spec, gw)
pool = build_pool(panel, gw, cv.scores, cv.margins)
print(f"pool at GW{gw}: {len(pool)} players\n")

problem = SelectionProblem(pool, budget=83.5)
solution = solve_squad(problem)
print(f"certified optimal in {solution.stats.wall_time:.2f}s "
      f"({solution.stats.nodes} nodes), zero violations: "
      f"{validate_squad(solution, pool, problem) == []}")
print(format_solution(solution, pool, 83.5))

# what-if: ban the captain and re-optimize; the objective can only drop
banned = solution.captain
cut = solve_squad(SelectionProblem(pool, budget=83.5, excludes=frozenset({banned})))
print(f"excluding the captain (id {banned}): objective {solution.objective:.4f} "
      f"-> {cut.objective:.4f}, new captain id {cut.captain}")

# robust variant: worst-case scores c - d; never beats the nominal objective
robust = solve_squad(SelectionProblem(pool, budget=83.5, robust=True))
print(f"robust worst-case objective {robust.objective:.4f} "
      f"<= deterministic {solution.objective:.4f}")

# on small pools the solver is provably exact: compare with full enumeration
# (mix stars with cheap enablers so a 15-man squad stays affordable)
by_pos = {"GK": [], "DEF": [], "MID": [], "FWD": []}
want = {"GK": 1, "DEF": 3, "MID": 3, "FWD": 2}
for e in sorted(pool.entries, key=lambda e: -e.expected_points):
    if len(by_pos[e.position]) < want[e.position]:
        by_pos[e.position].append(e)
for e in sorted(pool.entries, key=lambda e: e.value_m):
    if e not in by_pos[e.position] and len(by_pos[e.position]) < 2 * want[e.position]:
        by_pos[e.position].append(e)
small_entries = tuple(e for entries in by_pos.values() for e in entries)
from fplopt.panel import PlayerPool

small_pool = PlayerPool(entries=small_entries, target_gw=gw)
small_problem = SelectionProblem(small_pool, budget=83.5)
fast = solve_squad(small_problem)
slow = brute_force_oracle(small_problem)
print(f"\n18-player cross-check: solver {fast.objective:.4f} == enumeration {slow.objective:.4f}: "
      f"{fast.objective == slow.objective}")
