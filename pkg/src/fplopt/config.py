"""Run configuration: a flat key-value text format (documented in docs/config.md)."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .costs import ForecastSpec, Method
from .optimize import DEFAULT_BUDGET


@dataclass
class RunConfig:
    panel_path: str = ""
    split_week: int = 26
    forecast: ForecastSpec = field(default_factory=lambda: ForecastSpec(method=Method.WEIGHTED_AVG))
    budget: float = DEFAULT_BUDGET
    mode: str = "static"
    budgets: list[float] = field(default_factory=list)
    benchmark_label: str | None = None
    output_dir: str = "out"
    locks: frozenset[int] = frozenset()
    excludes: frozenset[int] = frozenset()
    club_quota: int = 3
    robust: bool = False
    seed: int = 20240526


def parse_kv(text: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _int_list(value: str) -> frozenset[int]:
    return frozenset(int(v) for v in value.split(",") if v.strip())


def _float_list(value: str) -> list[float]:
    return [float(v) for v in value.split(",") if v.strip()]


def load_config(path: str | Path) -> RunConfig:
    kv = parse_kv(Path(path).read_text(encoding="utf-8"))
    return config_from_kv(kv)


def config_from_kv(kv: dict[str, str]) -> RunConfig:
    cfg = RunConfig()
    spec = cfg.forecast
    if "method" in kv:
        spec = replace(spec, method=Method(kv["method"]))
    if "arima_order" in kv:
        p, d, q = (int(v) for v in kv["arima_order"].split(","))
        spec = replace(spec, arima_order=(p, d, q))
    for key, caster in (("horizon", int), ("resamples", int), ("seed", int),
                        ("ridge_alpha", float), ("hybrid_lambda", float)):
        if key in kv:
            spec = replace(spec, **{key: caster(kv[key])})
    if "hybrid_base" in kv:
        spec = replace(spec, hybrid_base=Method(kv["hybrid_base"]))
    cfg.forecast = spec
    if "panel_path" in kv:
        cfg.panel_path = kv["panel_path"]
    if "split_week" in kv:
        cfg.split_week = int(kv["split_week"])
    if "budget" in kv:
        cfg.budget = float(kv["budget"])
    if "mode" in kv:
        if kv["mode"] not in ("static", "rolling"):
            raise ValueError(f"mode must be static or rolling, got {kv['mode']!r}")
        cfg.mode = kv["mode"]
    if "budgets" in kv:
        cfg.budgets = _float_list(kv["budgets"])
    if "benchmark_label" in kv:
        cfg.benchmark_label = kv["benchmark_label"]
    if "output_dir" in kv:
        cfg.output_dir = kv["output_dir"]
    if "locks" in kv:
        cfg.locks = _int_list(kv["locks"])
    if "excludes" in kv:
        cfg.excludes = _int_list(kv["excludes"])
    if "club_quota" in kv:
        cfg.club_quota = int(kv["club_quota"])
    if "robust" in kv:
        cfg.robust = kv["robust"].lower() in ("1", "true", "yes")
    if "seed" in kv:
        cfg.seed = int(kv["seed"])
        cfg.forecast = replace(cfg.forecast, seed=cfg.seed)
    return cfg


def config_to_kv(cfg: RunConfig) -> str:
    """Render back to the flat format; embedded in every persisted artifact."""
    spec = cfg.forecast
    lines = [
        f"panel_path = {cfg.panel_path}",
        f"split_week = {cfg.split_week}",
        f"method = {spec.method.value}",
        f"arima_order = {spec.arima_order[0]},{spec.arima_order[1]},{spec.arima_order[2]}",
        f"horizon = {spec.horizon}",
        f"resamples = {spec.resamples}",
        f"ridge_alpha = {spec.ridge_alpha!r}",
        f"hybrid_lambda = {spec.hybrid_lambda!r}",
        f"hybrid_base = {spec.hybrid_base.value}",
        f"budget = {cfg.budget!r}",
        f"mode = {cfg.mode}",
        f"budgets = {','.join(repr(b) for b in cfg.budgets)}",
        f"benchmark_label = {cfg.benchmark_label or ''}",
        f"output_dir = {cfg.output_dir}",
        f"locks = {','.join(str(p) for p in sorted(cfg.locks))}",
        f"excludes = {','.join(str(p) for p in sorted(cfg.excludes))}",
        f"club_quota = {cfg.club_quota}",
        f"robust = {str(cfg.robust).lower()}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
