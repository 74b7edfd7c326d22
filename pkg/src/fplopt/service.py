"""HTTP decision service over an immutable panel snapshot.

Stateless request handling: every optimize call builds its pool from the
shared panel, solves in an isolated context, and runs the independent squad
validator before anything is emitted.  Backtests run as async jobs on a
bounded worker pool and are polled via /reports/{id}.
"""
from __future__ import annotations

import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .backtest import make_report, report_summary_json, run_rolling, run_static
from .costs import ForecastSpec, Method, build_cost_vector
from .errors import FplOptError, InfeasibleError
from .optimize import DEFAULT_BUDGET, XI_SIZE, SelectionProblem, solve_squad, validate_squad
from .panel import Panel, availability, build_pool, latest_price

log = logging.getLogger(__name__)


class OptimizeRequest(BaseModel):
    method: str = Method.WEIGHTED_AVG.value
    budget: float = DEFAULT_BUDGET
    target_gw: int | None = None  # defaults to split_week + 1
    locks: list[int] = Field(default_factory=list)
    excludes: list[int] = Field(default_factory=list)
    robust: bool = False
    arima_order: tuple[int, int, int] = (1, 0, 0)
    hybrid_lambda: float = 2 / 3
    seed: int = 20240526


class BacktestRequest(BaseModel):
    method: str = Method.WEIGHTED_AVG.value
    mode: str = "static"
    budget: float = DEFAULT_BUDGET
    robust: bool = False
    arima_order: tuple[int, int, int] = (1, 0, 0)
    seed: int = 20240526


def _bad_request(message: str, field: str | None = None) -> JSONResponse:
    payload = {"error": message}
    if field:
        payload["field"] = field
    return JSONResponse(status_code=400, content=payload)


def _spec_from(method: str, arima_order, hybrid_lambda: float = 2 / 3, seed: int = 20240526) -> ForecastSpec:
    return ForecastSpec(
        method=Method(method),
        arima_order=tuple(arima_order),
        hybrid_lambda=hybrid_lambda,
        seed=seed,
    )


def create_app(panel: Panel, *, workers: int = 2, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="fplopt decision service")
    app.add_middleware(  # the companion UI may be served from a dev origin
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    executor = ThreadPoolExecutor(max_workers=workers)
    jobs: dict[str, dict] = {}
    jobs_lock = threading.Lock()
    job_counter = itertools.count(1)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        location = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        return _bad_request(first.get("msg", "invalid request"), field=location or None)

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "players": len(panel.player_ids),
            "gameweeks": panel.season_length,
            "split_week": panel.split_week,
        }

    @app.get("/players")
    def players(gw: int):
        if not 1 <= gw <= panel.season_length:
            return _bad_request(f"gw must lie in [1, {panel.season_length}]", field="gw")
        rows = []
        for pid in panel.player_ids:
            price = latest_price(panel, pid, gw)
            if price is None:
                continue
            last = panel.player_records(pid)[-1]
            rows.append(
                {
                    "player_id": pid,
                    "name": last.name,
                    "team": last.team,
                    "position": last.position,
                    "value_m": round(price, 1),
                    "available": availability(panel, pid, gw),
                }
            )
        return {"gw": gw, "players": rows}

    @app.get("/forecasts")
    def forecasts(method: str, gw: int):
        try:
            spec = _spec_from(method, (1, 0, 0))
        except ValueError:
            return _bad_request(f"unknown method {method!r}", field="method")
        if not 2 <= gw <= panel.season_length:
            return _bad_request("gw must allow at least one week of history", field="gw")
        cv = build_cost_vector(panel, spec, gw)
        return {
            "method": spec.method.value,
            "as_of_week": gw,
            "scores": [
                {
                    "player_id": pid,
                    "score": round(cv.scores[pid], 4),
                    "margin": round(cv.margins.get(pid, 0.0), 4),
                    "fallback": pid in cv.fallbacks,
                }
                for pid in sorted(cv.scores)
            ],
        }

    @app.post("/optimize")
    def optimize(request: OptimizeRequest):
        if len(request.locks) > XI_SIZE:
            return _bad_request(f"at most {XI_SIZE} players can be locked", field="locks")
        if set(request.locks) & set(request.excludes):
            return _bad_request("locks and excludes overlap", field="locks")
        if request.budget <= 0:
            return _bad_request("budget must be positive", field="budget")
        try:
            spec = _spec_from(request.method, request.arima_order, request.hybrid_lambda, request.seed)
        except ValueError:
            return _bad_request(f"unknown method {request.method!r}", field="method")
        target_gw = request.target_gw or panel.split_week + 1
        if not panel.split_week < target_gw <= panel.season_length:
            return _bad_request(
                f"target_gw must lie in ({panel.split_week}, {panel.season_length}]", field="target_gw"
            )
        spec = replace(spec, horizon=max(1, panel.season_length - panel.split_week))
        try:
            cv = build_cost_vector(panel, spec, target_gw)
            pool = build_pool(panel, target_gw, cv.scores, cv.margins)
            problem = SelectionProblem(
                pool,
                budget=request.budget,
                robust=request.robust,
                locks=frozenset(request.locks),
                excludes=frozenset(request.excludes),
            )
            solution = solve_squad(problem)
        except InfeasibleError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc), "resource": exc.resource})
        except (FplOptError, ValueError) as exc:
            return _bad_request(str(exc))
        violations = validate_squad(solution, pool, problem)
        if violations:  # defensive: solver output must never reach the client unvalidated
            log.error("validator rejected a solver squad: %s", violations)
            return JSONResponse(status_code=500, content={"error": "internal validation failed", "violations": violations})
        by_id = pool.by_id()

        def row(pid: int) -> dict:
            e = by_id[pid]
            return {
                "player_id": pid,
                "name": e.name,
                "team": e.team,
                "position": e.position,
                "value_m": round(e.value_m, 1),
                "score": round(e.expected_points, 4),
                "margin": round(e.margin, 4),
            }

        d, m, f = solution.formation
        return {
            "xi": [row(p) for p in solution.xi],
            "captain": solution.captain,
            "bench": [row(p) for p in solution.bench],
            "formation": f"{d}-{m}-{f}",
            "objective": round(solution.objective, 4),
            "bench_objective": round(solution.bench_objective, 4),
            "total_spend": round(sum(by_id[p].value_m for p in solution.squad), 1),
            "optimal": solution.optimal,
            "method": spec.method.value,
            "budget": request.budget,
            "target_gw": target_gw,
            "locks": sorted(request.locks),
            "excludes": sorted(request.excludes),
        }

    @app.post("/backtest")
    def backtest(request: BacktestRequest):
        if request.mode not in ("static", "rolling"):
            return _bad_request("mode must be 'static' or 'rolling'", field="mode")
        try:
            spec = _spec_from(request.method, request.arima_order, seed=request.seed)
        except ValueError:
            return _bad_request(f"unknown method {request.method!r}", field="method")
        job_id = f"job-{next(job_counter)}"
        with jobs_lock:
            jobs[job_id] = {"status": "running"}

        def work():
            try:
                runner = run_static if request.mode == "static" else run_rolling
                run = runner(panel, spec, request.budget, robust=request.robust)
                summary = report_summary_json(make_report([run]))
                with jobs_lock:
                    jobs[job_id] = {"status": "done", "summary": summary}
            except Exception as exc:  # surfaced through the report endpoint
                log.exception("backtest job %s failed", job_id)
                with jobs_lock:
                    jobs[job_id] = {"status": "failed", "error": str(exc)}

        executor.submit(work)
        return {"job_id": job_id}

    @app.get("/reports/{job_id}")
    def report(job_id: str):
        with jobs_lock:
            job = jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id!r}"})
        return job

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
