"""Shared test utilities: seeded pool generation and an independent re-scorer."""
from __future__ import annotations

import numpy as np

from fplopt.panel import PlayerPool, PoolEntry

# Price mix skewed toward budget players, like a real pool (tenths of a million).
PRICE_CHOICES = [38, 39, 40, 41, 43, 45, 48, 50, 52, 55, 60, 68, 75, 90, 110, 130]
PRICE_WEIGHTS = [0.12, 0.1, 0.12, 0.08, 0.1, 0.1, 0.08, 0.07, 0.05, 0.05, 0.04, 0.03, 0.02, 0.02, 0.01, 0.01]


def random_pool(
    rng: np.random.Generator,
    sizes: tuple[int, int, int, int] = (2, 6, 6, 4),
    n_clubs: int = 7,
    score_step: float = 0.25,
    with_margins: bool = False,
    distinct_scores: bool = False,
    target_gw: int = 27,
) -> PlayerPool:
    """Seeded pool with quarter-point scores so objective sums are exact floats.

    ``distinct_scores`` adds a pid-proportional 1/1024 offset (still exactly
    representable) to rule out objective ties.
    """
    entries = []
    pid = 0
    for pos, count in zip(("GK", "DEF", "MID", "FWD"), sizes):
        for _ in range(count):
            pid += 1
            price = float(rng.choice(PRICE_CHOICES, p=PRICE_WEIGHTS)) / 10
            margin = float(rng.integers(0, 9)) * score_step if with_margins else 0.0
            score = float(rng.integers(0, 48)) * score_step
            if distinct_scores:
                score += pid / 1024.0
            entries.append(
                PoolEntry(
                    player_id=pid,
                    name=f"P{pid:02d}",
                    team=f"T{int(rng.integers(1, n_clubs + 1))}",
                    position=pos,
                    value_m=price,
                    expected_points=score,
                    margin=margin,
                )
            )
    return PlayerPool(entries=tuple(entries), target_gw=target_gw)


def rescore_week(squad, panel, gw) -> int:
    """Independent re-scorer: same policy, written as a separate walk of the rules.

    Deliberately structured differently from backtest.score_week (explicit
    slot bookkeeping instead of count deltas) so the two implementations
    cross-check each other.
    """
    from fplopt.optimize import FormationLimits
    from fplopt.panel import availability

    limits = FormationLimits()
    pos = {}
    for pid in squad.squad:
        try:
            pos[pid] = panel.position_of(pid)
        except Exception:
            pos[pid] = None

    playing = {p for p in squad.xi if availability(panel, p, gw)}
    bench_avail = [b for b in squad.bench if availability(panel, b, gw)]
    # absentees, most valuable first
    missing = sorted((p for p in squad.xi if p not in playing),
                     key=lambda p: (-squad.player_scores.get(p, 0.0), p))
    used = set()
    for out_p in missing:
        counts = {}
        for q in playing:
            counts[pos[q]] = counts.get(pos[q], 0) + 1
        deficit_positions = {k for k in ("GK", "DEF", "MID", "FWD")
                             if counts.get(k, 0) < limits.min_limit[k]}
        choices = []
        for b in bench_avail:
            if b in used:
                continue
            if pos[out_p] == "GK" and pos[b] != "GK":
                continue
            if pos[out_p] != "GK" and pos[b] == "GK":
                continue
            if counts.get(pos[b], 0) + 1 > limits.max_limit[pos[b]]:
                continue
            choices.append(b)
        if deficit_positions and any(pos[b] in deficit_positions for b in choices):
            choices = [b for b in choices if pos[b] in deficit_positions]
        if not choices:
            continue
        choices.sort(key=lambda b: (-squad.player_scores.get(b, 0.0), b))
        pick = choices[0]
        used.add(pick)
        playing.add(pick)

    if not playing:
        return 0
    total = 0
    for p in playing:
        total += panel.record(p, gw).total_points
    if squad.captain in playing:
        doubled = squad.captain
    else:
        doubled = min(playing, key=lambda p: (-squad.player_scores.get(p, 0.0), p))
    return total + panel.record(doubled, gw).total_points
