// DOM writer for the squad view. No squad logic lives here.

import type { PitchPlayer, SquadView } from "./view.js";

export type PlayerAction = (playerId: number) => void;

export function renderSquad(
  root: HTMLElement,
  view: SquadView | null,
  onLock: PlayerAction,
  onExclude: PlayerAction,
): void {
  root.textContent = "";
  if (view === null) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "Solving the first squad…";
    root.appendChild(empty);
    return;
  }
  if (view.banner !== null) {
    const banner = document.createElement("div");
    banner.className = "banner";
    banner.textContent = view.banner;
    root.appendChild(banner);
  }
  const summary = document.createElement("div");
  summary.className = "summary";
  const deltaText =
    view.objectiveDelta === null
      ? ""
      : ` (${view.objectiveDelta >= 0 ? "+" : ""}${view.objectiveDelta.toFixed(4)} vs previous)`;
  summary.innerHTML =
    `<strong>${view.formation}</strong>` +
    ` · objective ${view.objective.toFixed(4)}${deltaText}` +
    ` · spend £${view.spend.toFixed(1)}m of £${(view.budget + (100 - view.budget)).toFixed(0)}m` +
    ` (XI cap £${view.budget.toFixed(1)}m)` +
    (view.optimal ? "" : " · <em>best-known, not certified</em>") +
    (view.pending ? " · solving…" : "");
  root.appendChild(summary);

  if (view.playersIn.length || view.playersOut.length) {
    const deltas = document.createElement("div");
    deltas.className = "deltas";
    deltas.textContent =
      (view.playersIn.length ? `in: ${view.playersIn.join(", ")}` : "") +
      (view.playersIn.length && view.playersOut.length ? " — " : "") +
      (view.playersOut.length ? `out: ${view.playersOut.join(", ")}` : "");
    root.appendChild(deltas);
  }

  const pitch = document.createElement("div");
  pitch.className = "pitch";
  for (const row of view.rows) {
    const rowEl = document.createElement("div");
    rowEl.className = "pitch-row";
    rowEl.dataset.position = row.position;
    for (const player of row.players) {
      rowEl.appendChild(card(player, onLock, onExclude));
    }
    pitch.appendChild(rowEl);
  }
  root.appendChild(pitch);

  const benchEl = document.createElement("div");
  benchEl.className = "bench";
  const benchLabel = document.createElement("span");
  benchLabel.className = "bench-label";
  benchLabel.textContent = "bench";
  benchEl.appendChild(benchLabel);
  for (const player of view.bench) {
    benchEl.appendChild(card(player, onLock, onExclude));
  }
  root.appendChild(benchEl);
}

function card(player: PitchPlayer, onLock: PlayerAction, onExclude: PlayerAction): HTMLElement {
  const el = document.createElement("div");
  el.className = "card" + (player.isNew ? " new" : "") + (player.locked ? " locked" : "");
  const name = document.createElement("div");
  name.className = "name";
  name.textContent = player.name + (player.captain ? " ©" : "");
  const meta = document.createElement("div");
  meta.className = "meta";
  meta.textContent = `${player.team} · £${player.price.toFixed(1)}m · ${player.score.toFixed(2)}`;
  const actions = document.createElement("div");
  actions.className = "actions";
  const lock = document.createElement("button");
  lock.textContent = player.locked ? "unlock" : "lock";
  lock.title = "force this player into the XI";
  lock.addEventListener("click", () => onLock(player.id));
  const ban = document.createElement("button");
  ban.textContent = "exclude";
  ban.title = "bar this player and re-optimize";
  ban.addEventListener("click", () => onExclude(player.id));
  actions.append(lock, ban);
  el.append(name, meta, actions);
  return el;
}

export function renderToast(root: HTMLElement, toast: string | null): void {
  root.textContent = toast ?? "";
  root.classList.toggle("visible", toast !== null);
}
