"""Tour of the data layer: ingest, leakage wall, splits, pools.

Runs on a bundled synthetic season by default; pass a real player-gameweek
export to tour actual data:

    python demos/01_panel_tour.py [path/to/merged_gw.csv]
"""
import sys
import tempfile
from pathlib import Path

from fplopt.panel import (
    FEATURE_FIELDS,
    availability,
    build_pool,
    load_panel,
    points_series,
    save_snapshot,
)
from fplopt.synth import synthetic_panel, write_raw_csv

if len(sys.argv) > 1:
    panel = load_panel(sys.argv[1])
    print(f"loaded {sys.argv[1]}")
else:
    panel = synthetic_panel(seed=1)
    print("no file given; generated a synthetic 2023/24-shaped season (seed 1)")

print(f"\n{len(panel.records)} player-week records, {len(panel.player_ids)} players, "
      f"{len(panel.teams)} clubs")
print(f"train = weeks 1..{panel.split_week}, test = weeks {panel.split_week + 1}..{panel.season_length}")
print(f"forecasters can only see these features: {', '.join(FEATURE_FIELDS)}")

pid = panel.player_ids[0]
series = points_series(panel, pid, panel.split_week)
print(f"\nplayer {pid} points history through week {panel.split_week} "
      f"({len(series)} appearances): {series}")
print("missing weeks mean 'did not feature' and are omitted, never zero-filled:")
for gw in range(27, 31):
    print(f"  week {gw}: {'available' if availability(panel, pid, gw) else 'no record'}")

# a pool is the optimizer's view: identity, club, position, price, score, margin
scores = {p: float(len(points_series(panel, p, 26))) for p in panel.player_ids}
pool = build_pool(panel, target_gw=27, scores=scores)
entry = pool.entries[0]
print(f"\npool at GW27 holds {len(pool)} players; first entry: "
      f"{entry.name} ({entry.position}, {entry.team}) at {entry.value_m:.1f}M")

with tempfile.TemporaryDirectory() as tmp:
    raw = Path(tmp) / "raw.csv"
    snap = Path(tmp) / "snapshot.csv"
    write_raw_csv(panel, raw)
    reloaded = load_panel(raw)  # raw prices are tenths; loader divides by 10
    save_snapshot(reloaded, snap)
    print(f"\nraw export -> load -> snapshot round trip: "
          f"{len(reloaded.records)} records, snapshot at {snap.stat().st_size} bytes")
