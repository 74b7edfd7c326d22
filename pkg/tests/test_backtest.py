import json
import math
from dataclasses import replace

import numpy as np
import pytest
from helpers import rescore_week

import fplopt.backtest as bt
from fplopt.backtest import (
    budget_sweep,
    make_report,
    run_rolling,
    run_static,
    score_week,
    similarity_matrix,
    weekly_uplift,
    write_report,
)
from fplopt.costs import ForecastSpec, Method
from fplopt.errors import InfeasibleError
from fplopt.optimize import SquadSolution
from fplopt.panel import Panel, PlayerWeekRecord


def rec(pid, pos, gw, points, team=None, name=None):
    return PlayerWeekRecord(
        player_id=pid, name=name or f"P{pid}", team=team or f"T{pid}", position=pos,
        gw=gw, total_points=points, value_m=5.0, minutes=90, ict_index=1.0,
        xg=0.1, xa=0.1, xgi=0.2, xgc=0.3, selected_pct=1.0, starts=1,
    )


# Squad layout: XI = GK 1; DEF 2,3,4; MID 5,6,7,8,9; FWD 10,11 (3-5-2).
# Bench = GK 12, DEF 13, DEF 14, FWD 15.
XI = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11)
BENCH = (13, 12, 14, 15)
POS = {1: "GK", 2: "DEF", 3: "DEF", 4: "DEF", 5: "MID", 6: "MID", 7: "MID",
       8: "MID", 9: "MID", 10: "FWD", 11: "FWD", 12: "GK", 13: "DEF", 14: "DEF", 15: "FWD"}
SCORES = {pid: 20.0 - pid for pid in range(1, 12)}  # XI scores: captain should be pid 1? no: 19..9
SCORES.update({12: 3.0, 13: 5.0, 14: 2.0, 15: 4.0})


def make_squad(captain=2):
    return SquadSolution(
        xi=XI, captain=captain, bench=BENCH, formation=(3, 5, 2),
        objective=0.0, bench_objective=0.0, optimal=True, player_scores=dict(SCORES),
    )


def squad_panel(absent: dict[int, bool] | None = None, points: dict[int, int] | None = None,
                gw: int = 30) -> Panel:
    """One scoring week (plus a training stub so the panel has history)."""
    absent = absent or {}
    points = points or {}
    records = []
    for pid in range(1, 16):
        records.append(rec(pid, POS[pid], 1, 2))  # training stub
        if not absent.get(pid, False):
            records.append(rec(pid, POS[pid], gw, points.get(pid, pid)))
    return Panel(records, season_length=38, split_week=26)


class TestScoreWeek:
    def test_all_available_captain_doubled(self):
        # give every starter 5 points: XI sum 55, captain 5 more
        points = {pid: 5 for pid in range(1, 12)}
        panel = squad_panel(points=points)
        total, subs = score_week(make_squad(captain=2), panel, 30)
        assert total == 60
        assert subs == []

    def test_hand_example_fifty_plus_captain(self):
        # XI realized sum 50 with captain scoring 8 -> 58
        points = {1: 8, 2: 8, 3: 4, 4: 4, 5: 4, 6: 4, 7: 4, 8: 4, 9: 4, 10: 3, 11: 3}
        assert sum(points.values()) == 50
        panel = squad_panel(points=points)
        total, _ = score_week(make_squad(captain=1), panel, 30)
        assert total == 58

    def test_absent_def_replaced_by_bench_def(self):
        points = {pid: 2 for pid in range(1, 12)}
        points[13] = 7  # bench DEF
        panel = squad_panel(absent={3: True}, points=points)
        total, subs = score_week(make_squad(captain=2), panel, 30)
        # ten starters at 2 + bench DEF 7 + captain (2) doubled once more
        assert total == 10 * 2 + 7 + 2
        assert subs == [bt.Substitution(out_player=3, in_player=13)]

    def test_bench_gk_only_replaces_gk(self):
        panel = squad_panel(absent={5: True})  # a MID is out; bench GK available
        total, subs = score_week(make_squad(captain=2), panel, 30)
        assert subs[0].in_player in (13, 14, 15)  # never the bench GK (12)

    def test_absent_gk_takes_bench_gk(self):
        panel = squad_panel(absent={1: True})
        _, subs = score_week(make_squad(captain=2), panel, 30)
        assert subs == [bt.Substitution(out_player=1, in_player=12)]

    def test_no_legal_sub_leaves_slot_empty(self):
        panel = squad_panel(absent={1: True, 12: True})  # both keepers out
        total, subs = score_week(make_squad(captain=2), panel, 30)
        assert subs == [bt.Substitution(out_player=1, in_player=None)]
        expected = sum(pid for pid in range(2, 12)) + 2  # captain 2 doubled
        assert total == expected

    def test_captain_absent_doubling_transfers(self):
        points = {pid: 1 for pid in range(1, 12)}
        points[5] = 9  # highest stored score among remaining is pid 2... scores are 20-pid
        panel = squad_panel(absent={2: True, 13: True, 14: True, 15: True}, points=points)
        total, _ = score_week(make_squad(captain=2), panel, 30)
        # captain 2 absent, no outfield bench available: 10 starters play,
        # doubling moves to the highest-scored available starter: pid 1 (19.0)
        assert total == sum(points[p] for p in range(1, 12) if p != 2) + points[1]

    def test_entirely_absent_squad_scores_zero(self):
        panel = squad_panel(absent={pid: True for pid in range(1, 16)})
        total, subs = score_week(make_squad(), panel, 30)
        assert total == 0

    def test_formation_deficit_repaired_first(self):
        # two DEF out; bench has DEF 13 absent, DEF 14 and FWD 15 available.
        # DEF count would drop to 1 < 3, so the DEF must come in before the
        # higher-scored FWD is considered.
        scores = dict(SCORES)
        scores[15] = 9.0  # FWD outscores DEF 14
        squad = replace(make_squad(captain=5), player_scores=scores)
        panel = squad_panel(absent={2: True, 3: True, 13: True})
        _, subs = score_week(squad, panel, 30)
        assert bt.Substitution(out_player=2, in_player=14) in subs
        in_players = [s.in_player for s in subs]
        assert 14 in in_players and 15 in in_players

    def test_substitutions_never_create_illegal_formation(self, mini_panel):
        # spot check on real strategy squads across the blank week
        run = run_static(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG), budget=78.0)
        limits = bt.FormationLimits()
        for gw, squad in run.squads.items():
            from fplopt.panel import availability

            effective = [p for p in squad.xi if availability(mini_panel, p, gw)]
            for sub in run.substitutions[gw]:
                if sub.in_player is not None:
                    effective.append(sub.in_player)
            counts = {k: 0 for k in ("GK", "DEF", "MID", "FWD")}
            for p in effective:
                counts[mini_panel.position_of(p)] += 1
            if len(effective) == 11:
                assert counts["GK"] == 1 and counts["DEF"] >= 3
                assert counts["MID"] >= 2 and counts["FWD"] >= 1
            for k in ("GK", "DEF", "MID", "FWD"):
                assert counts[k] <= limits.max_limit[k]

    def test_agrees_with_independent_rescorer(self):
        rng = np.random.default_rng(314)
        for _ in range(30):
            absent = {pid: bool(rng.random() < 0.3) for pid in range(1, 16)}
            points = {pid: int(rng.integers(-2, 14)) for pid in range(1, 16)}
            panel = squad_panel(absent=absent, points=points)
            squad = make_squad(captain=int(rng.integers(1, 12)))
            mine, _ = score_week(squad, panel, 30)
            assert mine == rescore_week(squad, panel, 30)


@pytest.fixture(scope="module")
def static_run(mini_panel):
    return run_static(mini_panel, ForecastSpec(method=Method.WEIGHTED_AVG), budget=80.0)


class TestStrategies:
    def test_static_reuses_one_squad(self, static_run):
        squads = {id(s) for s in static_run.squads.values()}
        assert len(squads) == 1
        assert sorted(static_run.weekly_points) == list(range(27, 39))

    def test_cumulative_is_prefix_sum(self, static_run):
        total = 0
        for gw in sorted(static_run.weekly_points):
            total += static_run.weekly_points[gw]
            assert static_run.cumulative[gw] == total
        assert static_run.final_total == total

    def test_blank_week_still_scores(self, static_run):
        # the synthetic panel blanks much of week 29; scoring must not discard it
        assert 29 in static_run.weekly_points

    def test_rolling_changes_squads(self, mini_panel):
        run = run_rolling(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG), budget=80.0)
        assert sorted(run.weekly_points) == list(range(27, 39))
        distinct = {s.xi for s in run.squads.values()}
        assert len(distinct) >= 2  # availability shifts the pool week to week

    def test_rolling_no_lookahead(self, mini_panel):
        spec = ForecastSpec(method=Method.WEIGHTED_AVG)
        base = run_rolling(mini_panel, spec, budget=80.0)
        target = 30
        mutated_records = [
            replace(r, total_points=r.total_points + 40) if r.gw >= target else r
            for r in mini_panel.records
        ]
        mutated = Panel(mutated_records, season_length=mini_panel.season_length,
                        split_week=mini_panel.split_week)
        shadow = run_rolling(mutated, spec, budget=80.0)
        assert shadow.squads[target].xi == base.squads[target].xi
        assert shadow.squads[target].captain == base.squads[target].captain

    def test_rolling_constant_inputs_keep_the_squad(self):
        # identical problems week to week: full attendance, constant points
        # per player, constant prices -> rolling re-solves pick the same squad
        records = []
        pid = 0
        shape = [("GK", 2), ("DEF", 6), ("MID", 6), ("FWD", 4)]
        for pos, count in shape:
            for i in range(count):
                pid += 1
                for gw in range(1, 39):
                    records.append(rec(pid, pos, gw, points=pid % 7 + 1, team=f"T{pid}"))
        flat = Panel(records, season_length=38, split_week=26)
        run = run_rolling(flat, ForecastSpec(method=Method.SIMPLE_AVG), budget=80.0)
        squads = {(s.xi, s.captain, s.bench) for s in run.squads.values()}
        assert len(squads) == 1
        assert run.resolve_failures == []

    def test_rolling_solver_failure_reuses_previous_squad(self, mini_panel, monkeypatch):
        real = bt.solve_squad
        calls = {"n": 0}

        def flaky(problem):
            calls["n"] += 1
            if calls["n"] == 2:
                raise InfeasibleError("budget", "synthetic failure")
            return real(problem)

        monkeypatch.setattr(bt, "solve_squad", flaky)
        run = run_rolling(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG), budget=80.0)
        assert run.resolve_failures == [28]
        assert run.squads[28] is run.squads[27]


class TestSweepAndAnalytics:
    def test_winner_strip_partition(self, mini_panel):
        report = budget_sweep(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG),
                              budgets=[70.0, 80.0], mode="static")
        assert len(report.runs) == 3  # grid + base
        assert sorted(report.winner_strip) == list(range(27, 39))
        wins = {}
        for w in report.winner_strip.values():
            wins[w] = wins.get(w, 0) + 1
        assert sum(wins.values()) == 12

    def test_rolling_sweep_runs_per_budget(self, mini_panel):
        report = budget_sweep(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG),
                              budgets=[70.0], mode="rolling", include_base=False)
        run = report.runs[0]
        assert run.mode == "rolling"
        assert sorted(run.weekly_points) == list(range(27, 39))
        assert len({id(s) for s in run.squads.values()}) > 1

    def test_single_budget_strip_is_constant(self, mini_panel):
        report = budget_sweep(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG),
                              budgets=[80.0], mode="static", include_base=False)
        assert set(report.winner_strip.values()) == {"£80"}

    def test_leaderboard_sorted_desc(self, mini_panel):
        report = budget_sweep(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG),
                              budgets=[70.0, 80.0], mode="static")
        totals = [t for _, t in report.leaderboard]
        assert totals == sorted(totals, reverse=True)

    def test_similarity_examples(self):
        runs = [_stub_run("a", [1, 2, 3]), _stub_run("b", [3, 1, 2]),
                _stub_run("c", [2, 4, 6]), _stub_run("flat", [5, 5, 5])]
        labels, matrix = similarity_matrix(runs)
        i, j = labels.index("a"), labels.index("b")
        assert matrix[i, j] == pytest.approx(0.5)  # rho = -0.5, |rho| = 0.5
        k = labels.index("c")
        assert matrix[i, k] == pytest.approx(1.0)  # scaling preserves ranks
        assert matrix[i, i] == 1.0
        flat = labels.index("flat")
        assert math.isnan(matrix[i, flat])  # undefined, never coerced to 0
        assert np.allclose(matrix, matrix.T, equal_nan=True)

    def test_uplift_identities(self):
        a = _stub_run("a", [3, 1, 4, 1, 5])
        b = _stub_run("b", [2, 2, 2, 2, 2])
        assert weekly_uplift(a, a) == [0, 0, 0, 0, 0]
        deltas = weekly_uplift(a, b)
        assert sum(deltas) == a.final_total - b.final_total


class TestReportPersistence:
    def test_write_report_is_byte_reproducible(self, tmp_path, mini_panel):
        spec = ForecastSpec(method=Method.SIMPLE_AVG)
        report = budget_sweep(mini_panel, spec, budgets=[70.0, 80.0], mode="static")
        out1 = write_report(report, tmp_path / "r1")
        report2 = budget_sweep(mini_panel, spec, budgets=[70.0, 80.0], mode="static")
        out2 = write_report(report2, tmp_path / "r2")
        for name in ("leaderboard.csv", "winner_strip.csv", "similarity.csv", "summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_summary_json_contains_runs_and_seeds(self, tmp_path, mini_panel):
        run = run_static(mini_panel, ForecastSpec(method=Method.SIMPLE_AVG), budget=78.0)
        out = write_report(make_report([run]), tmp_path / "r")
        payload = json.loads((out / "summary.json").read_text())
        assert payload["runs"][0]["seed"] == run.spec.seed
        assert payload["runs"][0]["final_total"] == run.final_total

    def test_top10_by_median_uplift_reproducible_from_summary(self, tmp_path, mini_panel):
        spec = ForecastSpec(method=Method.SIMPLE_AVG)
        report = budget_sweep(mini_panel, spec, budgets=[60.0, 70.0, 80.0], mode="static")
        report.benchmark_label = report.runs[0].label
        report.uplift = {r.label: weekly_uplift(r, report.runs[0])
                         for r in report.runs if r.label != report.runs[0].label}
        out = write_report(report, tmp_path / "r")
        payload = json.loads((out / "summary.json").read_text())
        fresh = {label: float(np.median(deltas)) for label, deltas in payload["uplift"].items()}
        stored = {label: float(np.median(deltas)) for label, deltas in report.uplift.items()}
        assert fresh == stored


def _stub_run(label, weekly):
    weeks = dict(enumerate(weekly, start=27))
    cumulative, total = {}, 0
    for gw in sorted(weeks):
        total += weeks[gw]
        cumulative[gw] = total
    return bt.StrategyRun(label=label, spec=ForecastSpec(method=Method.SIMPLE_AVG),
                          budget=80.0, mode="static", weekly_points=weeks,
                          cumulative=cumulative, squads={})
