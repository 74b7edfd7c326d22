"""Command-line entry points; each subcommand drives the same code path the service uses."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .backtest import (
    budget_sweep,
    make_report,
    run_rolling,
    run_static,
    slug_label,
    write_report,
)
from .config import RunConfig, config_to_kv, load_config
from .costs import Method, build_cost_vector, save_cost_vector
from .errors import FplOptError
from .optimize import DEFAULT_BUDGET, SelectionProblem, format_solution, solve_squad, validate_squad
from .panel import Panel, build_pool, load_panel, save_snapshot


def _fail(kind: str, message: str) -> int:
    print(f"error: {kind}: {message}", file=sys.stderr)
    return 1


def _load(cfg: RunConfig) -> Panel:
    if not cfg.panel_path:
        raise FplOptError("no panel file given (use --panel or panel_path in the config)")
    return load_panel(cfg.panel_path, split_week=cfg.split_week)


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if env_out := os.environ.get("FPLOPT_OUTPUT_DIR"):
        cfg.output_dir = env_out
    for attr in ("panel", "out"):
        value = getattr(args, attr, None)
        if value:
            setattr(cfg, {"panel": "panel_path", "out": "output_dir"}[attr], str(value))
    if getattr(args, "split_week", None):
        cfg.split_week = args.split_week
    if getattr(args, "budget", None) is not None:
        cfg.budget = args.budget
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "robust", False):
        cfg.robust = True
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        cfg.forecast = replace(cfg.forecast, seed=args.seed)
    if getattr(args, "method", None):
        cfg.forecast = replace(cfg.forecast, method=Method(args.method))
    if getattr(args, "arima_order", None):
        p, d, q = (int(v) for v in args.arima_order.split(","))
        cfg.forecast = replace(cfg.forecast, arima_order=(p, d, q))
    if getattr(args, "hybrid_lambda", None) is not None:
        cfg.forecast = replace(cfg.forecast, hybrid_lambda=args.hybrid_lambda)
    if getattr(args, "hybrid_base", None):
        cfg.forecast = replace(cfg.forecast, hybrid_base=Method(args.hybrid_base))
    if getattr(args, "budgets", None):
        cfg.budgets = [float(v) for v in args.budgets.split(",")]
    if getattr(args, "lock", None):
        cfg.locks = frozenset(int(v) for v in args.lock.split(","))
    if getattr(args, "exclude", None):
        cfg.excludes = frozenset(int(v) for v in args.exclude.split(","))
    if getattr(args, "benchmark", None):
        cfg.benchmark_label = args.benchmark
    return cfg


def cmd_ingest(args) -> int:
    cfg = _config_from_args(args)
    panel = _load(cfg)
    out = _out_dir(cfg)
    snapshot = out / "panel_snapshot.csv"
    save_snapshot(panel, snapshot)
    (out / "ingest_config.txt").write_text(config_to_kv(cfg), encoding="utf-8")
    print(f"ingested {len(panel.records)} records for {len(panel.player_ids)} players "
          f"({len(panel.teams)} clubs) -> {snapshot}")
    return 0


def cmd_forecast(args) -> int:
    cfg = _config_from_args(args)
    panel = _load(cfg)
    gw = args.gw or panel.split_week + 1
    horizon = max(1, panel.season_length - panel.split_week) if cfg.mode == "static" else 1
    spec = replace(cfg.forecast, horizon=horizon)
    cv = build_cost_vector(panel, spec, gw)
    out = _out_dir(cfg) / f"costs_{slug_label(spec.label())}_gw{gw}.csv"
    save_cost_vector(cv, out)
    print(f"scored {len(cv.scores)} players ({len(cv.fallbacks)} fallbacks) -> {out}")
    return 0


def cmd_optimize(args) -> int:
    cfg = _config_from_args(args)
    panel = _load(cfg)
    gw = args.gw or panel.split_week + 1
    spec = replace(cfg.forecast, horizon=max(1, panel.season_length - panel.split_week))
    cv = build_cost_vector(panel, spec, gw)
    pool = build_pool(panel, gw, cv.scores, cv.margins)
    problem = SelectionProblem(pool, budget=cfg.budget, robust=cfg.robust,
                               club_quota=cfg.club_quota,
                               locks=cfg.locks, excludes=cfg.excludes)
    solution = solve_squad(problem)
    violations = validate_squad(solution, pool, problem)
    if violations:
        return _fail("validation", "; ".join(violations))
    text = format_solution(solution, pool, cfg.budget)
    out = _out_dir(cfg) / f"squad_{slug_label(spec.label())}_gw{gw}.txt"
    out.write_text(text, encoding="utf-8")
    out.with_suffix(".cfg").write_text(config_to_kv(cfg), encoding="utf-8")
    print(text, end="")
    return 0


def cmd_backtest(args) -> int:
    cfg = _config_from_args(args)
    panel = _load(cfg)
    runner = run_static if cfg.mode == "static" else run_rolling
    run = runner(panel, cfg.forecast, cfg.budget, robust=cfg.robust)
    report = make_report([run])
    out = _out_dir(cfg) / f"backtest_{slug_label(run.label)}"
    write_report(report, out)
    (out / "run_config.txt").write_text(config_to_kv(cfg), encoding="utf-8")
    print(f"{run.label}: final total {run.final_total} over weeks "
          f"{panel.split_week + 1}-{panel.season_length} -> {out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    if not cfg.budgets:
        return _fail("usage", "sweep needs --budgets (comma-separated)")
    panel = _load(cfg)
    report = budget_sweep(panel, cfg.forecast, cfg.budgets, mode=cfg.mode, robust=cfg.robust)
    out = _out_dir(cfg) / f"sweep_{slug_label(cfg.forecast.label())}_{cfg.mode}"
    write_report(report, out)
    (out / "run_config.txt").write_text(config_to_kv(cfg), encoding="utf-8")
    wins: dict[str, int] = {}
    for winner in report.winner_strip.values():
        wins[winner] = wins.get(winner, 0) + 1
    strip = ", ".join(f"{label}={count}" for label, count in sorted(wins.items(), key=lambda t: (-t[1], t[0])))
    print(f"winner counts: {strip} -> {out}")
    return 0


def cmd_report(args) -> int:
    import json

    run_dir = Path(args.run_dir)
    summary_path = run_dir / "summary.json"
    if not summary_path.exists():
        return _fail("usage", f"no summary.json under {run_dir}")
    payload = json.loads(summary_path.read_text(encoding="utf-8"))
    # Rebuild StrategyRun shells from the persisted summary and regenerate tables.
    from .backtest import StrategyRun
    from .costs import ForecastSpec

    runs = []
    for entry in payload["runs"]:
        weekly = {int(gw): pts for gw, pts in entry["weekly_points"].items()}
        cumulative, total = {}, 0
        for gw in sorted(weekly):
            total += weekly[gw]
            cumulative[gw] = total
        spec = ForecastSpec(method=Method.SIMPLE_AVG, seed=entry["seed"])
        runs.append(StrategyRun(label=entry["label"], spec=spec, budget=entry["budget"],
                                mode=entry["mode"], weekly_points=weekly, cumulative=cumulative,
                                squads={}, resolve_failures=entry.get("resolve_failures", [])))
    winner_strip = {int(gw): w for gw, w in payload.get("winner_strip", {}).items()}
    report = make_report(runs, benchmark_label=payload.get("benchmark_label"), winner_strip=winner_strip)
    out = Path(args.out) if args.out else run_dir
    write_report(report, out)
    print(f"regenerated tables for {len(runs)} runs -> {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _config_from_args(args)
    panel = _load(cfg)
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    app = create_app(panel, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fplopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gw=False):
        p.add_argument("--config", help="flat key-value run config file")
        p.add_argument("--panel", help="player-gameweek file (raw export or snapshot)")
        p.add_argument("--out", help="output directory (default ./out or $FPLOPT_OUTPUT_DIR)")
        p.add_argument("--split-week", type=int, help="train/test split week (default 26)")
        p.add_argument("--seed", type=int)
        if gw:
            p.add_argument("--gw", type=int, help="target gameweek (default split+1)")
            p.add_argument("--method", choices=[m.value for m in Method])
            p.add_argument("--arima-order", help="p,d,q (default 1,0,0)")
            p.add_argument("--hybrid-lambda", type=float)
            p.add_argument("--hybrid-base", choices=[m.value for m in Method if m is not Method.HYBRID_RIDGE])

    p = sub.add_parser("ingest", help="load, type-check and snapshot a panel file")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("forecast", help="write a cost vector for one method/gameweek")
    common(p, gw=True)
    p.add_argument("--mode", choices=["static", "rolling"], default="static")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("optimize", help="solve XI + captain + bench for one gameweek")
    common(p, gw=True)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--robust", action="store_true")
    p.add_argument("--lock", help="comma-separated player ids forced into the XI")
    p.add_argument("--exclude", help="comma-separated player ids barred from selection")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("backtest", help="score one strategy over the test weeks")
    common(p, gw=True)
    p.add_argument("--mode", choices=["static", "rolling"], default=None)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--robust", action="store_true")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("sweep", help="backtest one method across a budget grid")
    common(p, gw=True)
    p.add_argument("--budgets", help="comma-separated XI budgets, e.g. 55,60,65,70,75,80")
    p.add_argument("--mode", choices=["static", "rolling"], default=None)
    p.add_argument("--robust", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="regenerate report tables from a persisted summary")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP decision service")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", help="directory of built UI assets to mount at /ui")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FplOptError as exc:
        return _fail(getattr(exc, "resource", exc.__class__.__name__.lower()), str(exc))
    except (ValueError, OSError) as exc:
        return _fail("usage", str(exc))


if __name__ == "__main__":
    sys.exit(main())
