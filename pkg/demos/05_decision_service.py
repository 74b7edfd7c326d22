"""The HTTP decision service, exercised in-process: the what-if loop the UI drives.

    python demos/05_decision_service.py [path/to/merged_gw.csv]
"""
import sys

from fastapi.testclient import TestClient

from fplopt.panel import load_panel
from fplopt.service import create_app
from fplopt.synth import synthetic_panel

panel = load_panel(sys.argv[1]) if len(sys.argv) > 1 else synthetic_panel(seed=1, n_clubs=10)
client = TestClient(create_app(panel))

print("GET /health ->", client.get("/health").json())

players = client.get("/players", params={"gw": 27}).json()["players"]
print(f"GET /players?gw=27 -> {len(players)} players")

base = client.post("/optimize", json={"method": "weighted_avg", "budget": 83.5}).json()
print(f"\nPOST /optimize (weighted_avg, 83.5): formation {base['formation']}, "
      f"objective {base['objective']}, spend {base['total_spend']}")
captain = base["captain"]
cap_row = next(p for p in base["xi"] if p["player_id"] == captain)
print(f"captain: {cap_row['name']} ({cap_row['team']})")

# the what-if loop: exclude the captain, re-optimize, compare
cut = client.post("/optimize", json={"method": "weighted_avg", "budget": 83.5,
                                     "excludes": [captain]}).json()
print(f"\nexclude the captain -> objective {base['objective']} -> {cut['objective']} "
      f"(never an increase), new captain id {cut['captain']}")

# lock-then-unlock returns the original squad byte-for-byte
locked = client.post("/optimize", json={"method": "weighted_avg", "budget": 83.5,
                                        "locks": [captain]}).json()
unlocked = client.post("/optimize", json={"method": "weighted_avg", "budget": 83.5}).json()
print(f"lock then unlock restores the original squad: {unlocked == base}")

# guardrails
too_many = client.post("/optimize", json={"method": "weighted_avg",
                                          "locks": list(range(1, 13))})
print(f"\nlocking 12 players -> HTTP {too_many.status_code} ({too_many.json()['error']})")
broke = client.post("/optimize", json={"method": "weighted_avg", "budget": 30.0})
print(f"budget 30.0 -> HTTP {broke.status_code} (resource: {broke.json().get('resource')})")

# async backtest job
job = client.post("/backtest", json={"method": "simple_avg", "mode": "static"}).json()
print(f"\nPOST /backtest -> {job}")
import time

for _ in range(600):
    body = client.get(f"/reports/{job['job_id']}").json()
    if body["status"] != "running":
        break
    time.sleep(0.2)
print(f"GET /reports/{job['job_id']} -> status {body['status']}")
