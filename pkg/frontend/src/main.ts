import { httpTransport } from "./api.js";
import { SquadSession, stateFromQuery, stateToQuery } from "./state.js";
import { renderSquad, renderToast } from "./render.js";
import { buildView } from "./view.js";
import { METHODS } from "./types.js";

const pitchRoot = document.getElementById("squad") as HTMLElement;
const toastRoot = document.getElementById("toast") as HTMLElement;
const methodSelect = document.getElementById("method") as HTMLSelectElement;
const budgetSlider = document.getElementById("budget") as HTMLInputElement;
const budgetLabel = document.getElementById("budget-label") as HTMLElement;
const robustToggle = document.getElementById("robust") as HTMLInputElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;

for (const method of METHODS) {
  const option = document.createElement("option");
  option.value = method;
  option.textContent = method.replace(/_/g, " ");
  methodSelect.appendChild(option);
}

const session = new SquadSession(httpTransport(), stateFromQuery(location.search));

function syncControls(): void {
  methodSelect.value = session.state.method;
  budgetSlider.value = String(session.state.budget);
  budgetLabel.textContent = `£${session.state.budget.toFixed(1)}m`;
  robustToggle.checked = session.state.robust;
}

session.onChange((state) => {
  renderSquad(
    pitchRoot,
    buildView(state),
    (id) => void session.toggleLock(id),
    (id) => void session.toggleExclude(id),
  );
  renderToast(toastRoot, state.toast);
  history.replaceState(null, "", `?${stateToQuery(state)}`);
});

methodSelect.addEventListener("change", () => void session.setMethod(methodSelect.value));
budgetSlider.addEventListener("change", () => void session.setBudget(Number(budgetSlider.value)));
budgetSlider.addEventListener("input", () => {
  budgetLabel.textContent = `£${Number(budgetSlider.value).toFixed(1)}m`;
});
robustToggle.addEventListener("change", () => void session.setRobust(robustToggle.checked));
resetButton.addEventListener("click", () => {
  session.state.locks = [];
  session.state.excludes = [];
  void session.reoptimize();
});

syncControls();
void session.reoptimize();
