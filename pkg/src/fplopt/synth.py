"""Seeded synthetic player-gameweek panels for demos and offline testing.

The generator mimics the structure the pipeline cares about: 20 clubs, a
realistic position mix, prices correlated with quality and drifting in 0.1
steps, availability gaps for rotation players, one mass-blank week, and a few
players who first register mid-season.  It makes no attempt to mimic real
score distributions beyond integer points with occasional negatives and
hauls.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .panel import Panel, PlayerWeekRecord

CLUB_SIZE = {"GK": 3, "DEF": 9, "MID": 10, "FWD": 6}  # 28 x 20 clubs = 560 players
BLANK_WEEK = 29
BLANK_KEEP_RATE = 0.55


def synthetic_panel(
    seed: int = 0,
    n_clubs: int = 20,
    weeks: int = 38,
    split_week: int = 26,
    blank_week: int | None = BLANK_WEEK,
) -> Panel:
    rng = np.random.default_rng(seed)
    records: list[PlayerWeekRecord] = []
    pid = 0
    for club_i in range(n_clubs):
        club = f"Club {club_i + 1:02d}"
        club_strength = rng.uniform(0.35, 1.0)
        for position, count in CLUB_SIZE.items():
            for slot in range(count):
                pid += 1
                quality = rng.beta(2.0, 5.0) * club_strength
                if slot == 0:
                    quality = max(quality, 0.35 * club_strength + 0.15)  #each club has a regular starter
                mean_pts = 1.2 + 7.0 * quality
                sd_pts = 1.2 + 2.5 * quality
                appear_rate = min(0.97, 0.25 + 0.75 * quality + rng.uniform(0, 0.25))
                price = round(max(38, min(145, 38 + 90 * quality + rng.normal(0, 6))))
                debut = 1
                if rng.random() < 0.06:
                    debut = int(rng.integers(2, weeks - 4))
                name = f"Player {pid:03d}"
                for gw in range(debut, weeks + 1):
                    if rng.random() > appear_rate:
                        continue
                    if blank_week and gw == blank_week and rng.random() > BLANK_KEEP_RATE:
                        continue
                    pts = rng.normal(mean_pts, sd_pts)
                    if rng.random() < 0.05 * quality:
                        pts += rng.integers(6, 14)  # haul
                    if rng.random() < 0.04:
                        pts -= 3  # card / own goal style hit
                    pts = int(np.clip(round(pts), -4, 26))
                    started = int(rng.random() < 0.85)
                    minutes = int(rng.integers(60, 91)) if started else int(rng.integers(1, 45))
                    atk = quality * (1.6 if position in ("MID", "FWD") else 0.4)
                    xg = max(0.0, rng.normal(0.25 * atk, 0.12))
                    xa = max(0.0, rng.normal(0.18 * atk, 0.1))
                    xgc = max(0.0, rng.normal(1.5 - club_strength, 0.35)) if position in ("GK", "DEF") else max(
                        0.0, rng.normal(0.6, 0.2)
                    )
                    ict = max(0.0, 1.5 + 9.0 * quality + rng.normal(0, 1.5))
                    records.append(
                        PlayerWeekRecord(
                            player_id=pid,
                            name=name,
                            team=club,
                            position=position,
                            gw=gw,
                            total_points=pts,
                            value_m=price / 10.0,
                            minutes=minutes,
                            ict_index=round(ict, 1),
                            xg=round(xg, 2),
                            xa=round(xa, 2),
                            xgi=round(xg + xa, 2),
                            xgc=round(xgc, 2),
                            selected_pct=round(float(rng.uniform(0.1, 60.0) * quality + 0.1), 1),
                            starts=started,
                        )
                    )
                    if rng.random() < 0.08:  #price drift in 0.1 steps
                        price = int(np.clip(price + rng.choice([-1, 1]), 38, 150))
    return Panel(records, season_length=weeks, split_week=split_week)


RAW_HEADER = [
    "name", "position", "team", "element", "GW", "total_points", "value", "minutes",
    "ict_index", "expected_goals", "expected_assists", "expected_goal_involvements",
    "expected_goals_conceded", "selected", "starts",
    # leakage columns, populated with placeholder outcomes
    "goals_scored", "assists", "bonus", "bps", "clean_sheets", "goals_conceded",
    "yellow_cards", "red_cards", "saves", "penalties_saved", "penalties_missed",
    "own_goals", "team_h_score", "team_a_score", "opponent_team", "round",
    "kickoff_time", "fixture", "was_home",
]


def write_raw_csv(panel: Panel, path: str | Path) -> None:
    """Render the panel in the raw export layout (price in tenths, alias headers)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_HEADER)
        for r in panel.records:
            bonus = max(0, min(3, r.total_points - 6))
            writer.writerow([
                r.name, r.position, r.team, r.player_id, r.gw, r.total_points,
                round(r.value_m * 10), r.minutes, r.ict_index, r.xg, r.xa, r.xgi,
                r.xgc, r.selected_pct, r.starts,
                max(0, r.total_points // 5), 0, bonus, r.total_points * 3,
                int(r.total_points >= 6 and r.position in ("GK", "DEF")), 0, 0, 0, 0, 0, 0, 0,
                1, 1, (r.player_id + r.gw) % 20 + 1, r.gw,
                f"2023-0{1 + r.gw % 9}-01T15:00:00Z", r.gw * 10 + r.player_id % 10, int(r.gw % 2 == 0),
            ])
