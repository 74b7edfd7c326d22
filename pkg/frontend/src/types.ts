// Wire types mirroring the decision service exactly.

export type PlayerRow = {
  player_id: number;
  name: string;
  team: string;
  position: "GK" | "DEF" | "MID" | "FWD";
  value_m: number;
  score: number;
  margin: number;
};

export type OptimizeRequest = {
  method: string;
  budget: number;
  target_gw?: number;
  locks: number[];
  excludes: number[];
  robust: boolean;
};

export type OptimizeResponse = {
  xi: PlayerRow[];
  captain: number;
  bench: PlayerRow[];
  formation: string;
  objective: number;
  bench_objective: number;
  total_spend: number;
  optimal: boolean;
  method: string;
  budget: number;
  target_gw: number;
  locks: number[];
  excludes: number[];
};

export type ServiceError = {
  error: string;
  resource?: string;
  field?: string;
};

export const METHODS = [
  "simple_avg",
  "weighted_avg",
  "exp_smooth",
  "bootstrap",
  "monte_carlo",
  "arima",
  "linear_trend",
  "hybrid_ridge",
  "ict",
  "robust_ict",
  "involvement",
] as const;
