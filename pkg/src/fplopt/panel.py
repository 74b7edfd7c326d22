"""Player-gameweek panel: ingestion, leakage policy, splits and player pools.

The unit of analysis is one player in one gameweek.  Weeks in which a player
has no row mean "did not feature" and are never zero-filled.  Columns that
describe same-week outcomes (goals, bonus, cards, ...) are kept for scoring
realized squads but are walled off from every forecaster: model code can only
reach the panel through the feature accessors below, and those only expose
``FEATURE_FIELDS``.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import RowError, SchemaError, UnknownPlayerError

log = logging.getLogger(__name__)

POSITIONS = ("GK", "DEF", "MID", "FWD")

# Pre-deadline features a forecaster may consume (plus the points history
# itself, which is the target series, not a same-week covariate).
FEATURE_FIELDS = ("ict_index", "xg", "xa", "xgi", "xgc", "selected_pct", "starts")

# Same-week outcomes and schedule identifiers: stored, never modeled on.
LEAKAGE_COLUMNS = (
    "goals_scored",
    "clean_sheets",
    "goals_conceded",
    "penalties_missed",
    "saves",
    "penalties_saved",
    "own_goals",
    "yellow_cards",
    "red_cards",
    "assists",
    "team_h_score",
    "team_a_score",
    "bps",
    "bonus",
    "opponent_team",
    "round",
    "kickoff_time",
    "fixture",
    "was_home",
)

# Raw export header -> record field.  The normalized snapshot uses the record
# field names directly, so both formats load through the same map.
_SOURCE_ALIASES = {
    "player_id": ("player_id", "element"),
    "name": ("name",),
    "team": ("team",),
    "position": ("position",),
    "gw": ("gw", "GW"),
    "total_points": ("total_points",),
    "value_m": ("value_m", "value"),
    "minutes": ("minutes",),
    "ict_index": ("ict_index",),
    "xg": ("xg", "expected_goals"),
    "xa": ("xa", "expected_assists"),
    "xgi": ("xgi", "expected_goal_involvements"),
    "xgc": ("xgc", "expected_goals_conceded"),
    "selected_pct": ("selected_pct", "selected"),
    "starts": ("starts",),
}

_POSITION_ALIASES = {"GK": "GK", "GKP": "GK", "DEF": "DEF", "MID": "MID", "FWD": "FWD"}


@dataclass(frozen=True)
class PlayerWeekRecord:
    """One player x gameweek observation."""

    player_id: int
    name: str
    team: str
    position: str
    gw: int
    total_points: int
    value_m: float
    minutes: int
    ict_index: float
    xg: float
    xa: float
    xgi: float
    xgc: float
    selected_pct: float
    starts: int
    # Raw text of leakage/pass-through columns, for storage and re-scoring
    # only.  Forecast code must never read this mapping.
    extras: tuple[tuple[str, str], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class PoolEntry:
    player_id: int
    name: str
    team: str
    position: str
    value_m: float
    expected_points: float
    margin: float = 0.0


@dataclass(frozen=True)
class PlayerPool:
    """The optimizer's view of the player universe at one target gameweek."""

    entries: tuple[PoolEntry, ...]
    target_gw: int

    def __len__(self) -> int:
        return len(self.entries)

    def by_id(self) -> dict[int, PoolEntry]:
        return {e.player_id: e for e in self.entries}


class Panel:
    """Immutable collection of deduplicated PlayerWeekRecords plus indexes."""

    def __init__(self, records: list[PlayerWeekRecord], season_length: int = 38, split_week: int = 26):
        if not 1 <= split_week < season_length:
            raise ValueError(f"split_week {split_week} outside [1, {season_length})")
        self.season_length = season_length
        self.split_week = split_week
        self.records: tuple[PlayerWeekRecord, ...] = tuple(records)
        self._by_player: dict[int, list[PlayerWeekRecord]] = {}
        self._by_key: dict[tuple[int, int], PlayerWeekRecord] = {}
        for rec in self.records:
            self._by_player.setdefault(rec.player_id, []).append(rec)
            self._by_key[(rec.player_id, rec.gw)] = rec
        for recs in self._by_player.values():
            recs.sort(key=lambda r: r.gw)

    # -- basic accessors -------------------------------------------------
    @property
    def player_ids(self) -> list[int]:
        return sorted(self._by_player)

    @property
    def teams(self) -> list[str]:
        return sorted({r.team for r in self.records})

    def player_records(self, player_id: int) -> list[PlayerWeekRecord]:
        try:
            return list(self._by_player[player_id])
        except KeyError:
            raise UnknownPlayerError(f"player id {player_id} not in panel") from None

    def record(self, player_id: int, gw: int) -> PlayerWeekRecord | None:
        return self._by_key.get((player_id, gw))

    def train_records(self) -> list[PlayerWeekRecord]:
        return [r for r in self.records if r.gw <= self.split_week]

    def test_records(self) -> list[PlayerWeekRecord]:
        return [r for r in self.records if r.gw > self.split_week]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Panel)
            and self.season_length == other.season_length
            and self.split_week == other.split_week
            and self.records == other.records
        )

    # -- feature view (leakage wall) --------------------------------------
    def feature_series(self, player_id: int, feature: str, through_week: int) -> list[float]:
        """Values of one modeling feature over weeks 1..through_week, in week order."""
        if feature not in FEATURE_FIELDS:
            raise ValueError(f"'{feature}' is not a modeling feature")
        return [float(getattr(r, feature)) for r in self.player_records(player_id) if r.gw <= through_week]

    def feature_aggregates(self, through_week: int) -> dict[int, dict[str, float]]:
        """Per-player mean of each modeling feature over weeks 1..through_week.

        Players with no record in the window are absent from the result.
        """
        out: dict[int, dict[str, float]] = {}
        for pid, recs in self._by_player.items():
            window = [r for r in recs if r.gw <= through_week]
            if not window:
                continue
            n = len(window)
            out[pid] = {f: sum(float(getattr(r, f)) for r in window) / n for f in FEATURE_FIELDS}
        return out

    def position_of(self, player_id: int) -> str:
        return self.player_records(player_id)[-1].position


def points_series(panel: Panel, player_id: int, through_week: int) -> list[int]:
    """Past points p_t for weeks 1..through_week, in week order.

    Weeks without a record are omitted (the player did not feature), so the
    result may be shorter than ``through_week``.
    """
    if through_week > panel.season_length:
        raise ValueError(f"through_week {through_week} > season length {panel.season_length}")
    return [r.total_points for r in panel.player_records(player_id) if r.gw <= through_week]


def availability(panel: Panel, player_id: int, gw: int) -> bool:
    """True iff a record exists for (player_id, gw)."""
    if not 1 <= gw <= panel.season_length:
        raise ValueError(f"gw {gw} outside [1, {panel.season_length}]")
    return panel.record(player_id, gw) is not None


def latest_price(panel: Panel, player_id: int, target_gw: int) -> float | None:
    """Price at the most recent gameweek <= target_gw with a record."""
    price = None
    for rec in panel.player_records(player_id):
        if rec.gw > target_gw:
            break
        price = rec.value_m
    return price


def build_pool(
    panel: Panel,
    target_gw: int,
    scores: dict[int, float],
    margins: dict[int, float] | None = None,
) -> PlayerPool:
    """Assemble the optimizer's table for one target gameweek.

    Pools every player with at least one training record and an observable
    price at or before ``target_gw``; players without a score are dropped
    (counted in a warning).  Margins default to 0.
    """
    from .errors import EmptyPoolError

    if not panel.split_week < target_gw <= panel.season_length:
        raise ValueError(f"target_gw {target_gw} outside ({panel.split_week}, {panel.season_length}]")
    margins = margins or {}
    entries = []
    unscored = 0
    for pid in panel.player_ids:
        recs = panel.player_records(pid)
        if recs[0].gw > panel.split_week:
            continue  # no training history at all
        price = latest_price(panel, pid, target_gw)
        if price is None:
            continue
        if pid not in scores:
            unscored += 1
            continue
        d = float(margins.get(pid, 0.0))
        if d < 0:
            raise ValueError(f"negative margin for player {pid}")
        last = recs[-1]
        entries.append(
            PoolEntry(
                player_id=pid,
                name=last.name,
                team=last.team,
                position=last.position,
                value_m=price,
                expected_points=float(scores[pid]),
                margin=d,
            )
        )
    if unscored:
        log.warning("build_pool: dropped %d pooled players with no score", unscored)
    if not entries:
        raise EmptyPoolError(f"no players available for gameweek {target_gw}")
    return PlayerPool(entries=tuple(entries), target_gw=target_gw)


# -- ingestion -------------------------------------------------------------

def _resolve_columns(header: list[str], path: str) -> dict[str, str]:
    """Map record fields to the header names present, or raise SchemaError."""
    colmap = {}
    for fld, aliases in _SOURCE_ALIASES.items():
        for alias in aliases:
            if alias in header:
                colmap[fld] = alias
                break
        else:
            raise SchemaError(fld if len(aliases) == 1 else aliases[-1], path)
    return colmap


def load_panel(path: str | Path, season_length: int = 38, split_week: int = 26) -> Panel:
    """Load a raw player-gameweek export or a normalized snapshot.

    Raw exports carry the price in tenths of a million under ``value``; the
    normalized snapshot (written by :func:`save_snapshot`) already carries
    ``value_m`` in millions.  Duplicate (player_id, gw) rows keep the first
    occurrence; the number dropped is logged.
    """
    path = Path(path)
    records: list[PlayerWeekRecord] = []
    seen: set[tuple[int, int]] = set()
    duplicates = 0
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError("<header>", str(path))
        header = list(reader.fieldnames)
        colmap = _resolve_columns(header, str(path))
        raw_value = colmap["value_m"] == "value"  # tenths -> millions
        mapped = set(colmap.values())
        extra_cols = [c for c in header if c not in mapped]
        for line_no, row in enumerate(reader, start=2):
            try:
                pos = _POSITION_ALIASES[row[colmap["position"]].strip()]
                gw = int(row[colmap["gw"]])
                value = float(row[colmap["value_m"]])
                if raw_value:
                    value = value / 10.0
                rec = PlayerWeekRecord(
                    player_id=int(row[colmap["player_id"]]),
                    name=row[colmap["name"]].strip(),
                    team=row[colmap["team"]].strip(),
                    position=pos,
                    gw=gw,
                    total_points=int(row[colmap["total_points"]]),
                    value_m=value,
                    minutes=int(float(row[colmap["minutes"]])),
                    ict_index=float(row[colmap["ict_index"]] or 0.0),
                    xg=float(row[colmap["xg"]] or 0.0),
                    xa=float(row[colmap["xa"]] or 0.0),
                    xgi=float(row[colmap["xgi"]] or 0.0),
                    xgc=float(row[colmap["xgc"]] or 0.0),
                    selected_pct=float(row[colmap["selected_pct"]] or 0.0),
                    starts=int(float(row[colmap["starts"]] or 0)),
                    extras=tuple((c, row.get(c, "")) for c in extra_cols),
                )
            except (KeyError, ValueError) as exc:
                raise RowError(line_no, str(exc)) from exc
            if not 1 <= rec.gw <= season_length:
                raise RowError(line_no, f"gameweek {rec.gw} outside [1, {season_length}]")
            if rec.value_m <= 0:
                raise RowError(line_no, f"non-positive price {rec.value_m}")
            key = (rec.player_id, rec.gw)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            records.append(rec)
    if duplicates:
        log.info("load_panel: dropped %d duplicate (player_id, gw) rows", duplicates)
    return Panel(records, season_length=season_length, split_week=split_week)


SNAPSHOT_FIELDS = [
    "player_id", "name", "team", "position", "gw", "total_points", "value_m",
    "minutes", "ict_index", "xg", "xa", "xgi", "xgc", "selected_pct", "starts",
]


def save_snapshot(panel: Panel, path: str | Path) -> None:
    """Write the normalized columnar snapshot (schema in docs/schema.md).

    Floats are serialized with ``repr`` so a reload reproduces the panel
    bit-for-bit.
    """
    path = Path(path)
    extra_cols = sorted({c for r in panel.records for c, _ in r.extras})
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SNAPSHOT_FIELDS + extra_cols)
        for rec in panel.records:
            extras = dict(rec.extras)
            writer.writerow(
                [
                    rec.player_id, rec.name, rec.team, rec.position, rec.gw,
                    rec.total_points, repr(rec.value_m), rec.minutes,
                    repr(rec.ict_index), repr(rec.xg), repr(rec.xa),
                    repr(rec.xgi), repr(rec.xgc), repr(rec.selected_pct), rec.starts,
                ]
                + [extras.get(c, "") for c in extra_cols]
            )


def strip_extras(panel: Panel) -> Panel:
    """Copy of the panel without stored leakage text (smaller snapshots)."""
    return Panel(
        [replace(r, extras=()) for r in panel.records],
        season_length=panel.season_length,
        split_week=panel.split_week,
    )
