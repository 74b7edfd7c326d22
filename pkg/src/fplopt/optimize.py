"""Exact 0-1 squad selection: starting XI + captain, bench completion, robust variant.

The model maximizes sum(c_j x_j) + sum(c_j y_j) over binary starter variables
x and captain variables y, subject to: exactly 11 starters, XI budget, one
captain drawn from the XI, formation bounds per position, and at most three
squad players per club.  The bench is a second exact program over the
remaining players that completes the 2-5-5-3 squad inside the leftover
budget.  The robust variant replaces every coefficient with its worst-case
box endpoint c_j - d_j, which is exact because every selection variable has a
nonnegative objective multiplier.

The solver is a depth-first branch-and-bound on the LP relaxation (HiGHS via
scipy).  All money is handled in integer tenths of a million so feasibility
checks are exact.  Equal-objective ties resolve toward lower total cost
(exactly, via a cost probe at integer leaves), and beyond that the search
order is fixed, so solutions are byte-reproducible.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import FplOptError, InfeasibleError, PoolTooLargeError
from .panel import POSITIONS, PlayerPool

log = logging.getLogger(__name__)

XI_SIZE = 11
BENCH_SIZE = 4
DEFAULT_BUDGET = 83.5
TOTAL_BUDGET_TENTHS = 1000  # the 100.0M overall cap

# Bound slack added to each LP relaxation value before pruning, so LP solver
# noise can never cut off a true optimum; ties within this window are kept
# alive and resolved by the (cost, id set) rule.
_BOUND_SLACK = 1e-7
_TIE_EPS = 1e-9
_INT_TOL = 1e-7


@dataclass(frozen=True)
class FormationLimits:
    min_limit: dict[str, int] = field(default_factory=lambda: {"GK": 1, "DEF": 3, "MID": 2, "FWD": 1})
    max_limit: dict[str, int] = field(default_factory=lambda: {"GK": 1, "DEF": 5, "MID": 5, "FWD": 3})
    squad_totals: dict[str, int] = field(default_factory=lambda: {"GK": 2, "DEF": 5, "MID": 5, "FWD": 3})

    def __post_init__(self):
        if any(self.min_limit[k] > self.max_limit[k] for k in POSITIONS):
            raise ValueError("min limit exceeds max limit")
        if not sum(self.min_limit.values()) <= XI_SIZE <= sum(self.max_limit.values()):
            raise ValueError("formation bounds cannot produce an XI")
        if sum(self.squad_totals.values()) != XI_SIZE + BENCH_SIZE:
            raise ValueError("squad totals must sum to 15")


@dataclass(frozen=True)
class SelectionProblem:
    pool: PlayerPool
    budget: float = DEFAULT_BUDGET
    limits: FormationLimits = field(default_factory=FormationLimits)
    club_quota: int = 3
    robust: bool = False
    locks: frozenset[int] = frozenset()
    excludes: frozenset[int] = frozenset()
    time_budget: float = 10.0

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.locks & self.excludes:
            raise ValueError("locks and excludes overlap")
        if len(self.locks) > XI_SIZE:
            raise ValueError(f"at most {XI_SIZE} players can be locked")

    @property
    def budget_tenths(self) -> int:
        return round(self.budget * 10)

    @property
    def bench_budget_tenths(self) -> int:
        return TOTAL_BUDGET_TENTHS - self.budget_tenths

    def effective_scores(self) -> dict[int, float]:
        """Objective coefficients: nominal scores, or worst-case box endpoints."""
        if self.robust:
            return {e.player_id: e.expected_points - e.margin for e in self.pool.entries}
        return {e.player_id: e.expected_points for e in self.pool.entries}


@dataclass
class SolveStats:
    nodes: int = 0
    wall_time: float = 0.0


@dataclass
class SquadSolution:
    xi: tuple[int, ...]
    captain: int
    bench: tuple[int, ...]
    formation: tuple[int, int, int]  # DEF, MID, FWD counts
    objective: float
    bench_objective: float
    optimal: bool
    player_scores: dict[int, float]  # effective coefficient per squad member
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def squad(self) -> tuple[int, ...]:
        return self.xi + self.bench


def robust_coefficients(scores: dict[int, float], margins: dict[int, float]) -> dict[int, float]:
    """Worst-case coefficients over the box [c-d, c+d]: the lower endpoint."""
    return {pid: scores[pid] - margins.get(pid, 0.0) for pid in scores}


def objective_value(ids, captain: int, scores: dict[int, float]) -> float:
    """Canonical objective: deterministic summation order plus the captain's bonus."""
    return math.fsum(scores[i] for i in sorted(ids)) + scores[captain]


def best_captain(ids, scores: dict[int, float]) -> int:
    """Highest effective coefficient in the XI; ties go to the smallest id."""
    return max(sorted(ids), key=lambda i: (scores[i], -i))


def legal_formations(limits: FormationLimits) -> list[tuple[int, int, int, int]]:
    """All (GK, DEF, MID, FWD) count combinations for a legal XI."""
    out = []
    for counts in itertools.product(
        *(range(limits.min_limit[k], limits.max_limit[k] + 1) for k in POSITIONS)
    ):
        if sum(counts) == XI_SIZE:
            out.append(counts)
    return out


# -- generic exact selection core -------------------------------------------

@dataclass
class _Instance:
    ids: list[int]
    scores: np.ndarray
    prices: np.ndarray  # integer tenths, stored as float for the LP
    pos_idx: np.ndarray
    club_idx: np.ndarray
    clubs: list[str]
    total: int
    lo: np.ndarray
    hi: np.ndarray
    budget: int
    club_caps: np.ndarray
    fixed_one: frozenset[int]  # entry indexes
    fixed_zero: frozenset[int]
    with_captain: bool


class _SolverOutcome(FplOptError):
    pass


def _build_lp(inst: _Instance):
    """LP relaxation over the starter variables only.

    The captain term is bounded separately per node (best score still
    selectable), which keeps the LP at n variables; integer leaves then place
    the captain exactly via the argmax, which is the optimal assignment of
    the explicit captain binaries for a fixed XI.
    """
    n = len(inst.ids)
    cost = -inst.scores.astype(float)
    rows_ub, cols_ub, data_ub, b_ub = [], [], [], []

    def add_ub(cols, vals, rhs):
        r = len(b_ub)
        rows_ub.extend([r] * len(cols))
        cols_ub.extend(cols)
        data_ub.extend(vals)
        b_ub.append(rhs)

    add_ub(list(range(n)), list(inst.prices), float(inst.budget))
    for k in range(len(POSITIONS)):
        members = np.flatnonzero(inst.pos_idx == k).tolist()
        add_ub(members, [1.0] * len(members), float(inst.hi[k]))
        if inst.lo[k] > 0:
            add_ub(members, [-1.0] * len(members), -float(inst.lo[k]))
    for t in range(len(inst.clubs)):
        members = np.flatnonzero(inst.club_idx == t).tolist()
        if len(members) > inst.club_caps[t]:
            add_ub(members, [1.0] * len(members), float(inst.club_caps[t]))

    a_ub = sp.csr_matrix((data_ub, (rows_ub, cols_ub)), shape=(len(b_ub), n))
    a_eq = sp.csr_matrix(([1.0] * n, ([0] * n, list(range(n)))), shape=(1, n))
    return cost, a_ub, np.array(b_ub), a_eq, np.array([float(inst.total)])


def _build_probe_lp(inst: _Instance):
    """Cost-minimization probe used at integer leaves to settle objective ties.

    Minimizes total price subject to the node's constraints plus an
    objective-floor row; the captain binaries appear explicitly here so the
    floor accounts for the doubled score.  Prices are integers, so comparing
    the ceiling of the probe value against the incumbent's cost closes a node
    exactly.
    """
    n = len(inst.ids)
    nv = 2 * n if inst.with_captain else n
    cost = np.zeros(nv)
    cost[:n] = inst.prices
    rows_ub, cols_ub, data_ub, b_ub = [], [], [], []

    def add_ub(cols, vals, rhs):
        r = len(b_ub)
        rows_ub.extend([r] * len(cols))
        cols_ub.extend(cols)
        data_ub.extend(vals)
        b_ub.append(rhs)

    add_ub(list(range(n)), list(inst.prices), float(inst.budget))
    for k in range(len(POSITIONS)):
        members = np.flatnonzero(inst.pos_idx == k).tolist()
        add_ub(members, [1.0] * len(members), float(inst.hi[k]))
        if inst.lo[k] > 0:
            add_ub(members, [-1.0] * len(members), -float(inst.lo[k]))
    for t in range(len(inst.clubs)):
        members = np.flatnonzero(inst.club_idx == t).tolist()
        if len(members) > inst.club_caps[t]:
            add_ub(members, [1.0] * len(members), float(inst.club_caps[t]))
    if inst.with_captain:
        for j in range(n):  # y_j <= x_j
            add_ub([n + j, j], [1.0, -1.0], 0.0)
    # objective floor: -(s.x [+ s.y]) <= -rhs; rhs patched in per call
    floor_cols = list(range(nv))
    floor_vals = list(-inst.scores) * (2 if inst.with_captain else 1)
    add_ub(floor_cols, floor_vals, 0.0)
    floor_row = len(b_ub) - 1

    rows_eq, cols_eq, data_eq, b_eq = [0] * n, list(range(n)), [1.0] * n, [float(inst.total)]
    if inst.with_captain:
        rows_eq += [1] * n
        cols_eq += list(range(n, 2 * n))
        data_eq += [1.0] * n
        b_eq.append(1.0)
    a_ub = sp.csr_matrix((data_ub, (rows_ub, cols_ub)), shape=(len(b_ub), nv))
    a_eq = sp.csr_matrix((data_eq, (rows_eq, cols_eq)), shape=(len(b_eq), nv))
    return cost, a_ub, np.array(b_ub), a_eq, np.array(b_eq), floor_row


def _integer_feasible(inst: _Instance, chosen: list[int]) -> bool:
    """Exact re-check of a rounded LP point before it becomes an incumbent."""
    if len(chosen) != inst.total:
        return False
    if not all(j in chosen for j in inst.fixed_one):
        return False
    if any(j in inst.fixed_zero for j in chosen):
        return False
    if int(sum(int(inst.prices[j]) for j in chosen)) > inst.budget:
        return False
    pos_counts = np.bincount(inst.pos_idx[chosen], minlength=len(POSITIONS))
    if np.any(pos_counts < inst.lo) or np.any(pos_counts > inst.hi):
        return False
    club_counts = np.bincount(inst.club_idx[chosen], minlength=len(inst.clubs))
    return not np.any(club_counts > inst.club_caps)


def _solve_selection(inst: _Instance, time_budget: float) -> tuple[list[int], int | None, bool, SolveStats]:
    """Branch-and-bound over the LP relaxation.

    Returns (chosen entry indexes, captain entry index, optimal flag, stats).
    Raises InfeasibleError when no integer point exists.
    """
    n = len(inst.ids)
    cost, a_ub, b_ub, a_eq, b_eq = _build_lp(inst)
    p_cost, p_aub, p_bub, p_aeq, p_beq, p_floor = _build_probe_lp(inst)
    base_lower = np.zeros(n)
    base_upper = np.ones(n)
    for j in inst.fixed_one:
        base_lower[j] = 1.0
    for j in inst.fixed_zero:
        base_upper[j] = 0.0

    score_by_entry = inst.scores
    best: tuple[float, int, tuple[int, ...], int | None] | None = None  # obj, cost, ids, captain
    stats = SolveStats()
    deadline = time.monotonic() + time_budget
    timed_out = False

    def leaf_candidate(chosen: list[int]):
        if not _integer_feasible(inst, chosen):
            return None
        captain = None
        ids = tuple(sorted(inst.ids[j] for j in chosen))
        if inst.with_captain:
            by_id = {inst.ids[j]: j for j in chosen}
            cap_id = best_captain(ids, {inst.ids[j]: float(score_by_entry[j]) for j in chosen})
            captain = by_id[cap_id]
            obj = math.fsum(float(score_by_entry[j]) for j in sorted(chosen)) + float(score_by_entry[captain])
        else:
            obj = math.fsum(float(score_by_entry[j]) for j in sorted(chosen))
        total_cost = int(sum(int(inst.prices[j]) for j in chosen))
        return (obj, total_cost, ids, captain)

    # stack entries: (extra_ones, extra_zeros) as tuples of entry indexes
    stack: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((), ())]
    while stack:
        if time.monotonic() > deadline:
            timed_out = True
            break
        ones, zeros = stack.pop()
        stats.nodes += 1
        lower = base_lower.copy()
        upper = base_upper.copy()
        lower[list(ones)] = 1.0
        upper[list(zeros)] = 0.0
        if np.any(lower > upper):
            continue
        bounds = np.stack([lower, upper], axis=1)
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status != 0:
            continue  # infeasible subproblem (or numerically hopeless: treated as pruned)
        bound = -res.fun
        if inst.with_captain:
            selectable = upper > 0.5
            if not np.any(selectable):
                continue
            bound += float(np.max(score_by_entry[selectable]))  # captain is some selectable player
        bound += _BOUND_SLACK * (1.0 + abs(bound))
        if best is not None and bound < best[0] - _TIE_EPS:
            continue
        x = res.x[:n]
        fractional = np.flatnonzero(np.abs(x - np.round(x)) > _INT_TOL)
        if len(fractional) == 0:
            candidate = leaf_candidate(sorted(np.flatnonzero(np.round(x) > 0.5).tolist()))
            if candidate is not None:
                if _improves(candidate, best):
                    best = candidate
                # The LP picked one optimal vertex; the node may still hold an
                # equal-objective squad that is cheaper.  Probe for it.
                p_bub[p_floor] = -(best[0] - _TIE_EPS)
                if inst.with_captain:
                    pbounds = np.concatenate(
                        [np.stack([lower, upper], axis=1), np.stack([np.zeros(n), upper], axis=1)]
                    )
                else:
                    pbounds = bounds
                probe = linprog(p_cost, A_ub=p_aub, b_ub=p_bub, A_eq=p_aeq, b_eq=p_beq,
                                bounds=pbounds, method="highs")
                if probe.status != 0:
                    continue
                cost_floor = math.ceil(probe.fun - 1e-6)
                if cost_floor >= best[1]:
                    continue  # no cheaper tie in this node
                px = probe.x[:n]
                pfrac = np.flatnonzero(np.abs(px - np.round(px)) > _INT_TOL)
                if len(pfrac) == 0:
                    tie = leaf_candidate(sorted(np.flatnonzero(np.round(px) > 0.5).tolist()))
                    if tie is not None and tie[0] >= best[0] - _TIE_EPS and _improves(tie, best):
                        best = tie
                    continue
                branch = _pick_branch_var(px, pfrac)
                stack.append((ones, zeros + (branch,)))
                stack.append((ones + (branch,), zeros))
                continue
            # rounded point failed the exact re-check: fall through and branch
            fractional = np.arange(n)[upper > lower]  # any unfixed var disambiguates
            if len(fractional) == 0:
                continue
        branch = _pick_branch_var(x, fractional)
        stack.append((ones, zeros + (branch,)))
        stack.append((ones + (branch,), zeros))  # explore inclusion first

    if best is None:
        if timed_out:
            raise _SolverOutcome("time budget exhausted before any feasible squad was found")
        raise InfeasibleError("club_quota", "no assignment satisfies the combined constraints")
    chosen_entries = [j for j in range(n) if inst.ids[j] in set(best[2])]
    captain_entry = best[3]
    return chosen_entries, captain_entry, not timed_out, stats


def _improves(candidate, best) -> bool:
    if best is None:
        return True
    obj_c, cost_c, ids_c, _ = candidate
    obj_b, cost_b, ids_b, _ = best
    if obj_c > obj_b + _TIE_EPS:
        return True
    if obj_c < obj_b - _TIE_EPS:
        return False
    return (cost_c, ids_c) < (cost_b, ids_b)


def _pick_branch_var(x: np.ndarray, fractional: np.ndarray) -> int:
    gaps = np.abs(x[fractional] - 0.5)
    return int(fractional[np.argmin(gaps)])  # argmin takes the first on ties


# -- problem assembly --------------------------------------------------------

def _make_instance(problem: SelectionProblem, *, scores: dict[int, float],
                   include_ids: set[int], total: int, lo: dict[str, int], hi: dict[str, int],
                   budget_tenths: int, club_caps: dict[str, int],
                   fixed_one_ids: frozenset[int], with_captain: bool) -> _Instance:
    entries = [e for e in problem.pool.entries if e.player_id in include_ids]
    entries.sort(key=lambda e: e.player_id)
    clubs = sorted({e.team for e in entries})
    club_index = {t: i for i, t in enumerate(clubs)}
    pos_index = {k: i for i, k in enumerate(POSITIONS)}
    ids = [e.player_id for e in entries]
    id_to_entry = {pid: j for j, pid in enumerate(ids)}
    return _Instance(
        ids=ids,
        scores=np.array([scores[e.player_id] for e in entries], dtype=float),
        prices=np.array([round(e.value_m * 10) for e in entries], dtype=float),
        pos_idx=np.array([pos_index[e.position] for e in entries]),
        club_idx=np.array([club_index[e.team] for e in entries]),
        clubs=clubs,
        total=total,
        lo=np.array([lo[k] for k in POSITIONS]),
        hi=np.array([hi[k] for k in POSITIONS]),
        budget=budget_tenths,
        club_caps=np.array([club_caps[t] for t in clubs]),
        fixed_one=frozenset(id_to_entry[p] for p in fixed_one_ids),
        fixed_zero=frozenset(),
        with_captain=with_captain,
    )


def _probe_feasibility(inst: _Instance, what: str) -> None:
    """Cheap structural and budget checks so infeasibility names its resource."""
    pos_counts = np.bincount(inst.pos_idx, minlength=len(POSITIONS))
    if np.any(pos_counts < inst.lo) or sum(np.minimum(pos_counts, inst.hi)) < inst.total:
        short = [POSITIONS[k] for k in range(len(POSITIONS)) if pos_counts[k] < inst.lo[k]]
        raise InfeasibleError("positions", f"{what}: not enough candidates at {short or POSITIONS}")
    locked = sorted(inst.fixed_one)
    if locked:
        lock_pos = np.bincount(inst.pos_idx[locked], minlength=len(POSITIONS))
        if np.any(lock_pos > inst.hi):
            raise InfeasibleError("locks", f"{what}: locked players exceed a positional maximum")
        lock_clubs = np.bincount(inst.club_idx[locked], minlength=len(inst.clubs))
        if np.any(lock_clubs > inst.club_caps):
            raise InfeasibleError("locks", f"{what}: locked players exceed the club quota")
    min_cost = _cheapest_completion(inst)
    if min_cost is None:
        raise InfeasibleError("positions", f"{what}: no position count combination reaches {inst.total}")
    if min_cost > inst.budget:
        extra = ""
        if what == "bench":
            extra = (" (the default XI budget 83.5 leaves 16.5 for the bench:"
                     " four reserves at roughly 4.0M each plus a 0.5M buffer)")
        raise InfeasibleError(
            "budget",
            f"{what}: cheapest legal selection costs {min_cost / 10:.1f}M against a budget of "
            f"{inst.budget / 10:.1f}M{extra}",
        )


def _cheapest_completion(inst: _Instance) -> int | None:
    """Minimum total price over position-count combinations (club quota ignored).

    Locked entries are forced in; the remainder of each position quota takes
    the cheapest candidates.  A lower bound on any feasible selection's cost.
    """
    locked = set(inst.fixed_one)
    prices_by_pos: dict[int, list[int]] = {}
    locked_count = np.zeros(len(POSITIONS), dtype=int)
    locked_cost = 0
    for j in range(len(inst.ids)):
        if j in locked:
            locked_count[inst.pos_idx[j]] += 1
            locked_cost += int(inst.prices[j])
        else:
            prices_by_pos.setdefault(int(inst.pos_idx[j]), []).append(int(inst.prices[j]))
    for plist in prices_by_pos.values():
        plist.sort()
    best = None
    ranges = [range(inst.lo[k], inst.hi[k] + 1) for k in range(len(POSITIONS))]
    for counts in itertools.product(*ranges):
        if sum(counts) != inst.total:
            continue
        cost = locked_cost
        ok = True
        for k, want in enumerate(counts):
            need = want - int(locked_count[k])
            if need < 0 or need > len(prices_by_pos.get(k, [])):
                ok = False
                break
            cost += sum(prices_by_pos.get(k, [])[:need])
        if ok and (best is None or cost < best):
            best = cost
    return best


def solve_xi(problem: SelectionProblem) -> SquadSolution:
    """Certified-optimal starting XI plus captain (bench left empty)."""
    scores = problem.effective_scores()
    pool_ids = {e.player_id for e in problem.pool.entries}
    missing_locks = problem.locks - pool_ids
    if missing_locks:
        raise InfeasibleError("locks", f"locked players not in pool: {sorted(missing_locks)}")
    include = pool_ids - problem.excludes
    if problem.locks - include:
        raise InfeasibleError("locks", "a locked player is also excluded")
    inst = _make_instance(
        problem,
        scores=scores,
        include_ids=include,
        total=XI_SIZE,
        lo=problem.limits.min_limit,
        hi=problem.limits.max_limit,
        budget_tenths=problem.budget_tenths,
        club_caps={t: problem.club_quota for t in {e.team for e in problem.pool.entries}},
        fixed_one_ids=problem.locks,
        with_captain=True,
    )
    _probe_feasibility(inst, "starting XI")
    started = time.monotonic()
    chosen, captain_entry, optimal, stats = _solve_selection(inst, problem.time_budget)
    stats.wall_time = time.monotonic() - started
    xi_ids = tuple(sorted(inst.ids[j] for j in chosen))
    captain = inst.ids[captain_entry]
    by_id = problem.pool.by_id()
    formation = _formation_of(xi_ids, by_id)
    return SquadSolution(
        xi=xi_ids,
        captain=captain,
        bench=(),
        formation=formation,
        objective=objective_value(xi_ids, captain, scores),
        bench_objective=0.0,
        optimal=optimal,
        player_scores={pid: scores[pid] for pid in xi_ids},
        stats=stats,
    )


def solve_bench(problem: SelectionProblem, xi_solution: SquadSolution) -> SquadSolution:
    """Complete the 2-5-5-3 squad around a solved XI, maximizing bench points.

    The bench objective always uses the nominal expected points; the robust
    adjustment applies to the XI only.
    """
    by_id = problem.pool.by_id()
    nominal = {e.player_id: e.expected_points for e in problem.pool.entries}
    xi_set = set(xi_solution.xi)
    xi_pos = {k: sum(1 for p in xi_set if by_id[p].position == k) for k in POSITIONS}
    need = {k: problem.limits.squad_totals[k] - xi_pos[k] for k in POSITIONS}
    if any(v < 0 for v in need.values()) or sum(need.values()) != BENCH_SIZE:
        raise InfeasibleError("positions", f"XI position counts {xi_pos} cannot be completed to squad totals")
    xi_clubs: dict[str, int] = {}
    for p in xi_set:
        xi_clubs[by_id[p].team] = xi_clubs.get(by_id[p].team, 0) + 1
    caps = {t: problem.club_quota - xi_clubs.get(t, 0) for t in {e.team for e in problem.pool.entries}}
    include = {e.player_id for e in problem.pool.entries} - xi_set - problem.excludes
    inst = _make_instance(
        problem,
        scores=nominal,
        include_ids=include,
        total=BENCH_SIZE,
        lo=need,
        hi=need,
        budget_tenths=problem.bench_budget_tenths,
        club_caps=caps,
        fixed_one_ids=frozenset(),
        with_captain=False,
    )
    _probe_feasibility(inst, "bench")
    started = time.monotonic()
    chosen, _, optimal, stats = _solve_selection(inst, problem.time_budget)
    stats.wall_time = time.monotonic() - started
    bench_ids = [inst.ids[j] for j in chosen]
    bench_ids.sort(key=lambda p: (-nominal[p], p))  # listed by expected points
    scores = dict(xi_solution.player_scores)
    scores.update({p: nominal[p] for p in bench_ids})  # bench was chosen on nominal points
    merged_stats = SolveStats(
        nodes=xi_solution.stats.nodes + stats.nodes,
        wall_time=xi_solution.stats.wall_time + stats.wall_time,
    )
    return replace(
        xi_solution,
        bench=tuple(bench_ids),
        bench_objective=math.fsum(nominal[p] for p in sorted(bench_ids)),
        optimal=xi_solution.optimal and optimal,
        player_scores=scores,
        stats=merged_stats,
    )


def solve_squad(problem: SelectionProblem) -> SquadSolution:
    return solve_bench(problem, solve_xi(problem))


def _formation_of(xi_ids, by_id) -> tuple[int, int, int]:
    counts = {k: 0 for k in POSITIONS}
    for pid in xi_ids:
        counts[by_id[pid].position] += 1
    return counts["DEF"], counts["MID"], counts["FWD"]


# -- brute-force oracle ------------------------------------------------------

ORACLE_MAX_POOL = 22


def brute_force_oracle(problem: SelectionProblem, order: str = "asc") -> SquadSolution:
    """Exhaustive enumeration of every legal (XI, captain, bench); test oracle.

    ``order`` flips the per-position enumeration direction so two independent
    sweeps can cross-check each other.  Refuses pools above ORACLE_MAX_POOL.
    """
    pool = problem.pool
    if len(pool) > ORACLE_MAX_POOL:
        raise PoolTooLargeError(f"{len(pool)} players exceeds the {ORACLE_MAX_POOL}-player enumeration cap")
    scores = problem.effective_scores()
    nominal = {e.player_id: e.expected_points for e in pool.entries}
    by_id = pool.by_id()
    entries = sorted((e for e in pool.entries if e.player_id not in problem.excludes),
                     key=lambda e: e.player_id, reverse=(order == "desc"))
    by_pos = {k: [e for e in entries if e.position == k] for k in POSITIONS}
    price_t = {e.player_id: round(e.value_m * 10) for e in pool.entries}
    clubs = sorted({e.team for e in pool.entries})
    club_ix = {t: i for i, t in enumerate(clubs)}

    def combo_table(candidates, count, score_map):
        """Precompute (ids, price, club vector, score sum, best captain key) per combination."""
        table = []
        for combo in itertools.combinations(candidates, count):
            ids = tuple(e.player_id for e in combo)
            vec = [0] * len(clubs)
            for e in combo:
                vec[club_ix[e.team]] += 1
            cap_key = max(((score_map[p], -p) for p in ids), default=(float("-inf"), 0))
            table.append((ids, sum(price_t[p] for p in ids),
                          tuple(vec), sum(score_map[p] for p in ids), cap_key))
        return table

    quota = problem.club_quota
    best_xi = None  # (obj, cost, ids, captain)
    for counts in legal_formations(problem.limits):
        tables = [combo_table(by_pos[k], counts[i], scores) for i, k in enumerate(POSITIONS)]
        if any(not t for t in tables):
            continue
        for gk, df, md, fw in itertools.product(*tables):
            price = gk[1] + df[1] + md[1] + fw[1]
            if price > problem.budget_tenths:
                continue
            if any(a + b + c + d > quota for a, b, c, d in zip(gk[2], df[2], md[2], fw[2])):
                continue
            ids = gk[0] + df[0] + md[0] + fw[0]
            if problem.locks and not problem.locks <= set(ids):
                continue
            cap_key = max(gk[4], df[4], md[4], fw[4])
            ids = tuple(sorted(ids))
            captain = -cap_key[1]
            cand = (gk[3] + df[3] + md[3] + fw[3] + cap_key[0], price, ids, captain)
            if _improves(cand, best_xi):
                best_xi = cand
    if best_xi is None:
        raise InfeasibleError("budget", "enumeration found no legal XI within the budget")
    _, _, xi_ids, captain = best_xi
    obj = objective_value(xi_ids, captain, scores)  # canonical summation for the winner

    xi_set = set(xi_ids)
    need = {k: problem.limits.squad_totals[k] - sum(1 for p in xi_set if by_id[p].position == k)
            for k in POSITIONS}
    xi_vec = [0] * len(clubs)
    for p in xi_set:
        xi_vec[club_ix[by_id[p].team]] += 1
    best_bench = None
    rest_by_pos = {k: [e for e in by_pos[k] if e.player_id not in xi_set] for k in POSITIONS}
    tables = [combo_table(rest_by_pos[k], need[k], nominal) for k in POSITIONS]
    if all(tables):
        for gk, df, md, fw in itertools.product(*tables):
            price = gk[1] + df[1] + md[1] + fw[1]
            if price > problem.bench_budget_tenths:
                continue
            if any(x + a + b + c + d > quota
                   for x, a, b, c, d in zip(xi_vec, gk[2], df[2], md[2], fw[2])):
                continue
            ids = tuple(sorted(gk[0] + df[0] + md[0] + fw[0]))
            cand = (gk[3] + df[3] + md[3] + fw[3], price, ids, None)
            if _improves(cand, best_bench):
                best_bench = cand
    if best_bench is None:
        raise InfeasibleError("budget", "enumeration found no legal bench within the remaining budget")
    bench_ids = sorted(best_bench[2], key=lambda p: (-nominal[p], p))
    bench_obj = math.fsum(nominal[p] for p in sorted(best_bench[2]))
    return SquadSolution(
        xi=xi_ids,
        captain=captain,
        bench=tuple(bench_ids),
        formation=_formation_of(xi_ids, by_id),
        objective=obj,
        bench_objective=bench_obj,
        optimal=True,
        player_scores={p: scores[p] for p in xi_ids + tuple(bench_ids)},
    )


# -- independent validator ---------------------------------------------------

def validate_squad(solution: SquadSolution, pool: PlayerPool, problem: SelectionProblem) -> list[str]:
    """Re-check every squad invariant from raw pool prices/positions/clubs.

    Returns a list of violation messages; an empty list means the squad is
    legal.  Used on every solution the service emits.
    """
    by_id = pool.by_id()
    violations = []
    xi, bench = solution.xi, solution.bench
    if len(set(xi)) != XI_SIZE:
        violations.append(f"XI has {len(set(xi))} distinct players, expected {XI_SIZE}")
    if solution.captain not in xi:
        violations.append("captain is not in the XI")
    if len(set(bench)) != BENCH_SIZE:
        violations.append(f"bench has {len(set(bench))} distinct players, expected {BENCH_SIZE}")
    if set(xi) & set(bench):
        violations.append("XI and bench overlap")
    unknown = [p for p in xi + bench if p not in by_id]
    if unknown:
        violations.append(f"players not in pool: {unknown}")
        return violations
    xi_cost = sum(round(by_id[p].value_m * 10) for p in xi)
    if xi_cost > problem.budget_tenths:
        violations.append(f"XI cost {xi_cost / 10:.1f} exceeds budget {problem.budget:.1f}")
    bench_cost = sum(round(by_id[p].value_m * 10) for p in bench)
    if bench_cost > problem.bench_budget_tenths:
        violations.append(f"bench cost {bench_cost / 10:.1f} exceeds {problem.bench_budget_tenths / 10:.1f}")
    clubs: dict[str, int] = {}
    for p in xi + bench:
        clubs[by_id[p].team] = clubs.get(by_id[p].team, 0) + 1
    over = {t: c for t, c in clubs.items() if c > problem.club_quota}
    if over:
        violations.append(f"club quota exceeded: {over}")
    xi_counts = {k: sum(1 for p in xi if by_id[p].position == k) for k in POSITIONS}
    for k in POSITIONS:
        if not problem.limits.min_limit[k] <= xi_counts[k] <= problem.limits.max_limit[k]:
            violations.append(f"XI {k} count {xi_counts[k]} outside formation bounds")
    squad_counts = {k: sum(1 for p in xi + bench if by_id[p].position == k) for k in POSITIONS}
    if squad_counts != problem.limits.squad_totals:
        violations.append(f"squad totals {squad_counts} != {problem.limits.squad_totals}")
    if not problem.locks <= set(xi):
        violations.append("a locked player is missing from the XI")
    if problem.excludes & set(xi + bench):
        violations.append("an excluded player was selected")
    return violations


# -- solution text format ----------------------------------------------------

def format_solution(solution: SquadSolution, pool: PlayerPool, budget: float) -> str:
    """Diffable text rendering: header block, then one row per squad player."""
    by_id = pool.by_id()
    d, m, f = solution.formation
    lines = [
        f"objective {solution.objective:.4f}",
        f"bench_objective {solution.bench_objective:.4f}",
        f"formation {d}-{m}-{f}",
        f"budget {budget:.1f}",
        f"captain {solution.captain}",
        f"optimal {str(solution.optimal).lower()}",
        "slot,id,name,club,position,price,score",
    ]
    order = {k: i for i, k in enumerate(POSITIONS)}
    xi_sorted = sorted(solution.xi, key=lambda p: (order[by_id[p].position], p))
    for pid in xi_sorted:
        e = by_id[pid]
        cap = " (c)" if pid == solution.captain else ""
        lines.append(f"XI,{pid},{e.name}{cap},{e.team},{e.position},{e.value_m:.1f},{solution.player_scores[pid]:.4f}")
    for pid in solution.bench:
        e = by_id[pid]
        lines.append(f"BENCH,{pid},{e.name},{e.team},{e.position},{e.value_m:.1f},{solution.player_scores[pid]:.4f}")
    return "\n".join(lines) + "\n"
