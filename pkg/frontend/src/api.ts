import type { OptimizeRequest } from "./types.js";

export type TransportResult = { status: number; body: unknown };

/** POSTs an optimize request; swappable so the state machine tests run offline. */
export type Transport = (request: OptimizeRequest) => Promise<TransportResult>;

export function httpTransport(baseUrl = ""): Transport {
  return async (request) => {
    const response = await fetch(`${baseUrl}/optimize`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return { status: response.status, body: await response.json() };
  };
}
