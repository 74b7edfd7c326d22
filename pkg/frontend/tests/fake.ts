// A tiny deterministic stand-in for the decision service: greedy top-score
// pick per position over a fixed pool. Pure in the request, monotone under
// exclusions, honors locks — enough to exercise the what-if loop offline.

import type { Transport, TransportResult } from "../src/api.js";
import type { OptimizeRequest, OptimizeResponse, PlayerRow } from "../src/types.js";

const POSITION_SHAPE: Array<[PlayerRow["position"], number, number]> = [
  // position, XI count, bench count
  ["GK", 1, 1],
  ["DEF", 4, 1],
  ["MID", 4, 1],
  ["FWD", 2, 1],
];

export const FAKE_POOL: PlayerRow[] = (() => {
  const rows: PlayerRow[] = [];
  let id = 0;
  for (const [position, xi, bench] of POSITION_SHAPE) {
    const count = (xi + bench) * 2; // twice the demand per position
    for (let i = 0; i < count; i += 1) {
      id += 1;
      rows.push({
        player_id: id,
        name: `P${id}`,
        team: `T${(id % 6) + 1}`,
        position,
        value_m: 4 + (id % 9) * 0.5,
        score: 10 - i * 0.75 + id / 128,
        margin: 0,
      });
    }
  }
  return rows;
})();

export function fakeSolve(request: OptimizeRequest): TransportResult {
  if (request.budget < 60) {
    return {
      status: 422,
      body: { error: `infeasible (budget): cheapest legal selection exceeds ${request.budget}`, resource: "budget" },
    };
  }
  const excluded = new Set(request.excludes);
  const locked = new Set(request.locks);
  const xi: PlayerRow[] = [];
  const bench: PlayerRow[] = [];
  for (const [position, xiCount, benchCount] of POSITION_SHAPE) {
    const available = FAKE_POOL.filter(
      (p) => p.position === position && !excluded.has(p.player_id),
    );
    const forced = available.filter((p) => locked.has(p.player_id));
    const rest = available
      .filter((p) => !locked.has(p.player_id))
      .sort((a, b) => b.score - a.score || a.player_id - b.player_id);
    const picked = [...forced, ...rest].slice(0, xiCount + benchCount);
    xi.push(...picked.slice(0, xiCount));
    bench.push(...picked.slice(xiCount));
  }
  // the captain adds one more copy of the highest effective score in the XI
  const captain = xi.reduce((best, p) => (p.score > best.score ? p : best), xi[0]!);
  const objective = xi.reduce((acc, p) => acc + (request.robust ? p.score - p.margin : p.score), 0) + captain.score;
  const response: OptimizeResponse = {
    xi,
    captain: captain.player_id,
    bench,
    formation: "4-4-2",
    objective: Math.round(objective * 10_000) / 10_000,
    bench_objective: bench.reduce((acc, p) => acc + p.score, 0),
    total_spend: [...xi, ...bench].reduce((acc, p) => acc + p.value_m, 0),
    optimal: true,
    method: request.method,
    budget: request.budget,
    target_gw: 27,
    locks: [...request.locks].sort((a, b) => a - b),
    excludes: [...request.excludes].sort((a, b) => a - b),
  };
  return { status: 200, body: response };
}

export function fakeTransport(): Transport {
  return async (request) => fakeSolve(request);
}
