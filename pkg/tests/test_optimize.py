import itertools
import math

import numpy as np
import pytest
from helpers import random_pool

from fplopt.errors import InfeasibleError, PoolTooLargeError
from fplopt.optimize import (
    FormationLimits,
    SelectionProblem,
    brute_force_oracle,
    format_solution,
    legal_formations,
    objective_value,
    robust_coefficients,
    solve_bench,
    solve_squad,
    solve_xi,
    validate_squad,
)
from fplopt.panel import PlayerPool, PoolEntry


def make_pool(rows, target_gw=27):
    entries = [
        PoolEntry(player_id=pid, name=f"P{pid}", team=team, position=pos,
                  value_m=price, expected_points=score, margin=margin)
        for pid, pos, team, price, score, margin in rows
    ]
    return PlayerPool(entries=tuple(entries), target_gw=target_gw)


def minimal_pool():
    """15 players forming exactly one legal squad: a 4-4-2 XI plus 4 bench."""
    rows = [
        (1, "GK", "T1", 4.0, 5.0, 0.0), (2, "GK", "T2", 4.0, 2.0, 0.0),
        (3, "DEF", "T3", 4.0, 4.0, 0.0), (4, "DEF", "T4", 4.0, 4.5, 0.0),
        (5, "DEF", "T5", 4.0, 3.0, 0.0), (6, "DEF", "T6", 4.0, 2.5, 0.0),
        (7, "DEF", "T7", 4.0, 1.0, 0.0),
        (8, "MID", "T1", 5.0, 6.0, 0.0), (9, "MID", "T2", 5.0, 5.5, 0.0),
        (10, "MID", "T3", 5.0, 5.0, 0.0), (11, "MID", "T4", 5.0, 4.0, 0.0),
        (12, "MID", "T5", 5.0, 0.5, 0.0),
        (13, "FWD", "T6", 6.0, 7.0, 0.0), (14, "FWD", "T7", 6.0, 6.5, 0.0),
        (15, "FWD", "T8", 6.0, 0.25, 0.0),
    ]
    return make_pool(rows)


class TestSolveBasics:
    def test_captain_is_argmax_when_budget_slack(self):
        pool = minimal_pool()
        problem = SelectionProblem(pool, budget=79.0)
        solution = solve_squad(problem)
        assert solution.captain == max(solution.xi, key=lambda p: solution.player_scores[p])
        assert validate_squad(solution, pool, problem) == []

    def test_unique_feasible_squad(self):
        # shrink the pool to exactly one legal squad: 11 XI players + 4 bench
        pool = minimal_pool()
        problem = SelectionProblem(pool, budget=70.0)
        solution = solve_squad(problem)
        oracle = brute_force_oracle(problem)
        assert solution.xi == oracle.xi
        assert solution.bench == oracle.bench

    def test_objective_includes_captain_once_more(self):
        pool = minimal_pool()
        problem = SelectionProblem(pool, budget=79.0)
        s = solve_xi(problem)
        assert s.objective == pytest.approx(
            math.fsum(s.player_scores[p] for p in s.xi) + s.player_scores[s.captain]
        )

    def test_bench_is_exact_positional_complement(self):
        pool = minimal_pool()
        problem = SelectionProblem(pool, budget=79.0)
        solution = solve_squad(problem)
        by_id = pool.by_id()
        squad_counts = {k: 0 for k in ("GK", "DEF", "MID", "FWD")}
        for p in solution.squad:
            squad_counts[by_id[p].position] += 1
        assert squad_counts == {"GK": 2, "DEF": 5, "MID": 5, "FWD": 3}


class TestOracleAgreement:
    def test_seeded_instances(self):
        rng = np.random.default_rng(1234)
        feasible = 0
        for _ in range(40):
            pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11)
            problem = SelectionProblem(pool, budget=float(rng.integers(600, 840)) / 10)
            solved = oracle = None
            try:
                solved = solve_squad(problem)
            except InfeasibleError:
                pass
            try:
                oracle = brute_force_oracle(problem)
            except InfeasibleError:
                pass
            assert (solved is None) == (oracle is None)
            if solved is None:
                continue
            feasible += 1
            assert solved.objective == oracle.objective
            assert solved.bench_objective == oracle.bench_objective
            assert solved.xi == oracle.xi and solved.captain == oracle.captain
            assert solved.bench == oracle.bench
        assert feasible >= 15

    def test_enumeration_orders_agree(self):
        rng = np.random.default_rng(77)
        checked = 0
        for _ in range(10):
            pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11)
            problem = SelectionProblem(pool, budget=78.0)
            try:
                asc = brute_force_oracle(problem, order="asc")
                desc = brute_force_oracle(problem, order="desc")
            except InfeasibleError:
                continue
            checked += 1
            assert asc.objective == desc.objective
            assert asc.xi == desc.xi and asc.captain == desc.captain
        assert checked >= 4

    def test_oracle_refuses_large_pools(self):
        rng = np.random.default_rng(5)
        pool = random_pool(rng, sizes=(3, 8, 8, 6))  # 25 players
        with pytest.raises(PoolTooLargeError):
            brute_force_oracle(SelectionProblem(pool))

    def test_all_prices_above_budget_infeasible_both_ways(self):
        rows = [(i, pos, f"T{i}", 12.0, 3.0, 0.0)
                for i, pos in enumerate(
                    ["GK"] * 2 + ["DEF"] * 5 + ["MID"] * 5 + ["FWD"] * 3, start=1)]
        pool = make_pool(rows)
        problem = SelectionProblem(pool, budget=50.0)
        with pytest.raises(InfeasibleError) as solver_err:
            solve_xi(problem)
        with pytest.raises(InfeasibleError):
            brute_force_oracle(problem)
        assert solver_err.value.resource == "budget"


class TestRobust:
    def test_zero_margins_reduce_to_deterministic(self):
        rng = np.random.default_rng(11)
        pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11, with_margins=False)
        det = solve_squad(SelectionProblem(pool, budget=80.0, robust=False))
        rob = solve_squad(SelectionProblem(pool, budget=80.0, robust=True))
        assert det.xi == rob.xi and det.captain == rob.captain
        assert det.objective == rob.objective

    def test_endpoint_arithmetic(self):
        adjusted = robust_coefficients({1: 5.0, 2: 3.0}, {1: 2.0})
        assert adjusted == {1: 3.0, 2: 3.0}

    def test_matches_explicit_maxmin_enumeration(self):
        """Solving with c - d equals brute max-min over all box corners."""
        rng = np.random.default_rng(21)
        verified = 0
        for _ in range(6):
            pool = random_pool(rng, sizes=(1, 4, 5, 3), n_clubs=9, with_margins=True)
            problem = SelectionProblem(pool, budget=80.0, robust=True)
            try:
                solution = solve_xi(problem)
            except InfeasibleError:
                continue
            verified += 1
            best = _explicit_maxmin(pool, problem)
            assert solution.objective == pytest.approx(best, abs=1e-9)
        assert verified >= 3

    def test_robust_never_beats_deterministic(self):
        rng = np.random.default_rng(31)
        for _ in range(8):
            pool = random_pool(rng, sizes=(2, 5, 6, 4), n_clubs=11, with_margins=True)
            try:
                det = solve_xi(SelectionProblem(pool, budget=78.0, robust=False))
                rob = solve_xi(SelectionProblem(pool, budget=78.0, robust=True))
            except InfeasibleError:
                continue
            robust_value_of_det = objective_value(
                det.xi, det.captain, {e.player_id: e.expected_points - e.margin for e in pool.entries}
            )
            assert rob.objective <= det.objective + 1e-9
            assert rob.objective >= robust_value_of_det - 1e-9


def _explicit_maxmin(pool, problem):
    """Enumerate every legal (XI, captain) and minimize over box corners."""
    entries = list(pool.entries)
    by_pos = {k: [e for e in entries if e.position == k] for k in ("GK", "DEF", "MID", "FWD")}
    price = {e.player_id: round(e.value_m * 10) for e in entries}
    nonzero_margin = [e.player_id for e in entries if e.margin > 0]
    lo = {e.player_id: e.expected_points - e.margin for e in entries}
    hi = {e.player_id: e.expected_points + e.margin for e in entries}
    best = None
    for counts in legal_formations(problem.limits):
        combos = [itertools.combinations(by_pos[k], c) for k, c in zip(("GK", "DEF", "MID", "FWD"), counts)]
        for parts in itertools.product(*combos):
            xi = [e for part in parts for e in part]
            ids = [e.player_id for e in xi]
            if sum(price[p] for p in ids) > problem.budget_tenths:
                continue
            clubs = {}
            bad = False
            for e in xi:
                clubs[e.team] = clubs.get(e.team, 0) + 1
                if clubs[e.team] > problem.club_quota:
                    bad = True
                    break
            if bad:
                continue
            for captain in ids:
                worst = None
                corner_ids = [p for p in nonzero_margin if p in ids or p == captain]
                for corner in itertools.product((0, 1), repeat=len(corner_ids)):
                    c = {p: (hi[p] if bit else lo[p]) for p, bit in zip(corner_ids, corner)}
                    total = math.fsum(c.get(p, lo[p] if p in nonzero_margin else pool.by_id()[p].expected_points)
                                      for p in sorted(ids))
                    total += c.get(captain, pool.by_id()[captain].expected_points)
                    if worst is None or total < worst:
                        worst = total
                if best is None or worst > best:
                    best = worst
    return best


def _feasible_instance(rng, budget=80.0):
    for _ in range(10):
        pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11)
        try:
            return pool, solve_squad(SelectionProblem(pool, budget=budget))
        except InfeasibleError:
            continue
    raise AssertionError("no feasible instance in 10 draws")


class TestLocksExcludes:
    def test_lock_forces_player_in(self):
        rng = np.random.default_rng(41)
        pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11)
        base = solve_xi(SelectionProblem(pool, budget=80.0))
        outsider = next(e.player_id for e in pool.entries if e.player_id not in base.xi
                        and e.position != "GK")
        locked = solve_xi(SelectionProblem(pool, budget=80.0, locks=frozenset({outsider})))
        assert outsider in locked.xi
        assert locked.objective <= base.objective

    def test_exclude_bars_player(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            pool, base = _feasible_instance(rng)
            victim = base.captain
            try:
                cut = solve_squad(SelectionProblem(pool, budget=80.0, excludes=frozenset({victim})))
            except InfeasibleError:
                continue  # tight pools may not survive removing a player
            assert victim not in cut.squad
            assert cut.objective <= base.objective
            return
        raise AssertionError("no instance admitted an exclusion")

    def test_locks_and_excludes_must_not_overlap(self):
        rng = np.random.default_rng(43)
        pool = random_pool(rng)
        with pytest.raises(ValueError):
            SelectionProblem(pool, locks=frozenset({1}), excludes=frozenset({1}))

    def test_too_many_locks_rejected(self):
        rng = np.random.default_rng(44)
        pool = random_pool(rng)
        with pytest.raises(ValueError):
            SelectionProblem(pool, locks=frozenset(range(1, 14)))


class TestProperties:
    def test_monotone_budget(self):
        rng = np.random.default_rng(51)
        pool = random_pool(rng, sizes=(2, 7, 7, 5), n_clubs=11)
        previous = None
        for budget in (55.0, 60.0, 65.0, 70.0, 75.0, 80.0, 83.5):
            try:
                solution = solve_xi(SelectionProblem(pool, budget=budget))
            except InfeasibleError:
                assert previous is None
                continue
            if previous is not None:
                assert solution.objective >= previous - 1e-9
            previous = solution.objective

    def test_argmax_invariance_under_positive_scaling(self):
        rng = np.random.default_rng(52)
        scaled_checked = 0
        for _ in range(6):
            pool = random_pool(rng, sizes=(2, 5, 5, 4), n_clubs=10, distinct_scores=True)
            try:
                base = solve_xi(SelectionProblem(pool, budget=78.0))
            except InfeasibleError:
                continue
            factor = 3.7
            scaled_entries = tuple(
                PoolEntry(e.player_id, e.name, e.team, e.position, e.value_m,
                          e.expected_points * factor, e.margin)
                for e in pool.entries
            )
            scaled_pool = PlayerPool(entries=scaled_entries, target_gw=27)
            scaled = solve_xi(SelectionProblem(scaled_pool, budget=78.0))
            assert scaled.xi == base.xi and scaled.captain == base.captain
            scaled_checked += 1
        assert scaled_checked >= 2

    def test_deterministic_bytes(self):
        rng = np.random.default_rng(53)
        pool, _ = _feasible_instance(rng)
        problem = SelectionProblem(pool, budget=80.0)
        a = format_solution(solve_squad(problem), pool, 80.0)
        b = format_solution(solve_squad(problem), pool, 80.0)
        assert a == b

    def test_captain_dominance(self):
        rng = np.random.default_rng(54)
        pool = random_pool(rng, sizes=(2, 6, 6, 4), n_clubs=11)
        try:
            s = solve_xi(SelectionProblem(pool, budget=80.0))
        except InfeasibleError:
            pytest.skip("instance infeasible")
        cap_score = s.player_scores[s.captain]
        assert all(cap_score >= s.player_scores[p] for p in s.xi)


class TestInfeasibilityReports:
    def test_not_enough_goalkeepers(self):
        rows = [(i, pos, f"T{i}", 4.0, 2.0, 0.0)
                for i, pos in enumerate(["DEF"] * 6 + ["MID"] * 6 + ["FWD"] * 4, start=1)]
        pool = make_pool(rows)
        with pytest.raises(InfeasibleError) as err:
            solve_xi(SelectionProblem(pool))
        assert err.value.resource == "positions"

    def test_bench_budget_message_mentions_buffer(self):
        # XI affordable, but remaining players are too expensive for the bench
        rows = [
            (1, "GK", "T1", 4.0, 5.0, 0.0), (2, "GK", "T2", 9.9, 1.0, 0.0),
            (3, "DEF", "T3", 4.0, 4.0, 0.0), (4, "DEF", "T4", 4.0, 4.0, 0.0),
            (5, "DEF", "T5", 4.0, 4.0, 0.0), (6, "DEF", "T6", 9.9, 1.0, 0.0),
            (7, "DEF", "T7", 9.8, 0.5, 0.0),
            (8, "MID", "T1", 5.0, 6.0, 0.0), (9, "MID", "T2", 5.0, 6.0, 0.0),
            (10, "MID", "T3", 5.0, 6.0, 0.0), (11, "MID", "T4", 5.0, 6.0, 0.0),
            (12, "MID", "T5", 9.9, 0.5, 0.0),
            (13, "FWD", "T6", 6.0, 7.0, 0.0), (14, "FWD", "T7", 6.0, 7.0, 0.0),
            (15, "FWD", "T8", 9.7, 0.25, 0.0),
        ]
        pool = make_pool(rows)
        problem = SelectionProblem(pool, budget=90.0)  # bench budget only 10.0
        xi = solve_xi(problem)
        with pytest.raises(InfeasibleError) as err:
            solve_bench(problem, xi)
        assert err.value.resource == "budget"
        assert "buffer" in str(err.value)

    def test_overconstraining_locks_named(self):
        rows = [(i, pos, "SAME" if i <= 6 else f"T{i}", 4.0, 3.0, 0.0)
                for i, pos in enumerate(
                    ["GK"] * 2 + ["DEF"] * 6 + ["MID"] * 6 + ["FWD"] * 4, start=1)]
        pool = make_pool(rows)
        # four locked players from one club exceed the quota before any search
        with pytest.raises(InfeasibleError) as err:
            solve_xi(SelectionProblem(pool, locks=frozenset({3, 4, 5, 6})))
        assert err.value.resource == "locks"
        # two locked goalkeepers exceed the positional maximum
        with pytest.raises(InfeasibleError) as err:
            solve_xi(SelectionProblem(pool, locks=frozenset({1, 2})))
        assert err.value.resource == "locks"


class TestFormationEnumeration:
    def test_eight_legal_formations(self):
        formations = legal_formations(FormationLimits())
        assert len(formations) == 8
        assert (1, 3, 5, 2) in formations
        assert (1, 3, 4, 3) in formations
        assert all(sum(f) == 11 for f in formations)
