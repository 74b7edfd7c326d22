// Pure view-model builders: everything the pitch shows, computed from state
// so the rendering layer stays a dumb DOM writer (and this logic is testable
// without a browser).

import type { UiState } from "./state.js";
import type { OptimizeResponse, PlayerRow } from "./types.js";

export type PitchPlayer = {
  id: number;
  name: string;
  team: string;
  price: number;
  score: number;
  captain: boolean;
  locked: boolean;
  isNew: boolean; // not in the comparison squad
};

export type SquadView = {
  rows: Array<{ position: string; players: PitchPlayer[] }>;
  bench: PitchPlayer[];
  formation: string;
  objective: number;
  objectiveDelta: number | null;
  playersIn: string[];
  playersOut: string[];
  spend: number;
  budget: number;
  withinBudget: boolean;
  optimal: boolean;
  banner: string | null;
  toast: string | null;
  pending: boolean;
  hasComparison: boolean;
};

const ROW_ORDER: Array<PlayerRow["position"]> = ["GK", "DEF", "MID", "FWD"];

export function buildView(state: UiState): SquadView | null {
  const current = state.current;
  if (current === null) {
    return null;
  }
  const previousIds = new Set(squadIds(state.previous));
  const toPitch = (row: PlayerRow): PitchPlayer => ({
    id: row.player_id,
    name: row.name,
    team: row.team,
    price: row.value_m,
    score: row.score,
    captain: row.player_id === current.captain,
    locked: state.locks.includes(row.player_id),
    isNew: state.previous !== null && !previousIds.has(row.player_id),
  });
  const rows = ROW_ORDER.map((position) => ({
    position,
    players: current.xi.filter((p) => p.position === position).map(toPitch),
  }));
  const spend = round1(
    current.xi.reduce((acc, p) => acc + p.value_m, 0) +
      current.bench.reduce((acc, p) => acc + p.value_m, 0),
  );
  const currentIds = new Set(squadIds(current));
  const previous = state.previous;
  const names = (response: OptimizeResponse, ids: Set<number>, keep: (id: number) => boolean) =>
    [...response.xi, ...response.bench].filter((p) => keep(p.player_id)).map((p) => p.name);
  return {
    rows,
    bench: current.bench.map(toPitch),
    formation: current.formation,
    objective: current.objective,
    objectiveDelta: previous === null ? null : round4(current.objective - previous.objective),
    playersIn: previous === null ? [] : names(current, currentIds, (id) => !previousIds.has(id)),
    playersOut: previous === null ? [] : names(previous, previousIds, (id) => !currentIds.has(id)),
    spend,
    budget: state.budget,
    withinBudget: current.xi.reduce((acc, p) => acc + p.value_m, 0) <= state.budget + 1e-9,
    optimal: current.optimal,
    banner: state.banner,
    toast: state.toast,
    pending: state.pending,
    hasComparison: previous !== null,
  };
}

function squadIds(response: OptimizeResponse | null): number[] {
  if (response === null) return [];
  return [...response.xi, ...response.bench].map((p) => p.player_id);
}

function round1(x: number): number {
  return Math.round(x * 10) / 10;
}

function round4(x: number): number {
  return Math.round(x * 10_000) / 10_000;
}
