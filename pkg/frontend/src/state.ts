// The what-if loop. The UI never edits a squad itself: every change to
// locks/excludes/budget/method goes through POST /optimize, so anything on
// screen came back from the solver's validator. One request is in flight at
// a time; superseded responses are discarded by sequence number.

import type { Transport } from "./api.js";
import type { OptimizeResponse, ServiceError } from "./types.js";

export type UiState = {
  method: string;
  budget: number;
  robust: boolean;
  locks: number[];
  excludes: number[];
  current: OptimizeResponse | null;
  previous: OptimizeResponse | null; // comparison slot: the squad before the last change
  banner: string | null; // infeasibility report, shown verbatim
  toast: string | null; // transient service error; squads unchanged
  pending: boolean;
};

export function initialState(): UiState {
  return {
    method: "weighted_avg",
    budget: 83.5,
    robust: false,
    locks: [],
    excludes: [],
    current: null,
    previous: null,
    banner: null,
    toast: null,
    pending: false,
  };
}

export class SquadSession {
  state: UiState;
  private sequence = 0;
  private applied = 0;
  private listeners: Array<(state: UiState) => void> = [];

  constructor(private transport: Transport, state?: UiState) {
    this.state = state ?? initialState();
  }

  onChange(listener: (state: UiState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  /** Re-solve with the present knobs; stale responses are dropped. */
  async reoptimize(): Promise<UiState> {
    const ticket = ++this.sequence;
    this.state.pending = true;
    this.state.toast = null;
    this.emit();
    let result;
    try {
      result = await this.transport({
        method: this.state.method,
        budget: this.state.budget,
        robust: this.state.robust,
        locks: [...this.state.locks].sort((a, b) => a - b),
        excludes: [...this.state.excludes].sort((a, b) => a - b),
      });
    } catch (error) {
      if (ticket === this.sequence) {
        this.state.pending = false;
        this.state.toast = `service unreachable: ${String(error)}`;
        this.emit();
      }
      return this.state;
    }
    if (ticket <= this.applied || ticket !== this.sequence) {
      return this.state; // superseded by a newer action
    }
    this.applied = ticket;
    this.state.pending = false;
    if (result.status === 200) {
      this.state.previous = this.state.current;
      this.state.current = result.body as OptimizeResponse;
      this.state.banner = null;
    } else if (result.status === 422) {
      this.state.banner = (result.body as ServiceError).error;
    } else {
      this.state.toast = (result.body as ServiceError).error ?? `HTTP ${result.status}`;
    }
    this.emit();
    return this.state;
  }

  toggleLock(playerId: number): Promise<UiState> {
    if (this.state.locks.includes(playerId)) {
      this.state.locks = this.state.locks.filter((p) => p !== playerId);
    } else {
      this.state.locks = [...this.state.locks, playerId];
      this.state.excludes = this.state.excludes.filter((p) => p !== playerId);
    }
    return this.reoptimize();
  }

  toggleExclude(playerId: number): Promise<UiState> {
    if (this.state.excludes.includes(playerId)) {
      this.state.excludes = this.state.excludes.filter((p) => p !== playerId);
    } else {
      this.state.excludes = [...this.state.excludes, playerId];
      this.state.locks = this.state.locks.filter((p) => p !== playerId);
    }
    return this.reoptimize();
  }

  setBudget(budget: number): Promise<UiState> {
    this.state.budget = budget;
    return this.reoptimize();
  }

  setMethod(method: string): Promise<UiState> {
    this.state.method = method;
    return this.reoptimize();
  }

  setRobust(robust: boolean): Promise<UiState> {
    this.state.robust = robust;
    return this.reoptimize();
  }
}

// Everything needed to rebuild the view is (method, budget, robust, locks,
// excludes): shareable as a URL query.
export function stateToQuery(state: UiState): string {
  const params = new URLSearchParams();
  params.set("method", state.method);
  params.set("budget", String(state.budget));
  if (state.robust) params.set("robust", "1");
  if (state.locks.length) params.set("locks", [...state.locks].sort((a, b) => a - b).join(","));
  if (state.excludes.length) {
    params.set("excludes", [...state.excludes].sort((a, b) => a - b).join(","));
  }
  return params.toString();
}

export function stateFromQuery(query: string): UiState {
  const params = new URLSearchParams(query);
  const state = initialState();
  if (params.get("method")) state.method = params.get("method")!;
  if (params.get("budget")) state.budget = Number(params.get("budget"));
  state.robust = params.get("robust") === "1";
  const ids = (key: string) =>
    (params.get(key) ?? "")
      .split(",")
      .filter((v) => v.length)
      .map(Number);
  state.locks = ids("locks");
  state.excludes = ids("excludes");
  return state;
}
