/** Browser bootstrap: wire sockets, keys, pickers, and the render loop. */

import { CockpitClient, type SocketLike } from "./net.js";
import { InputLoop } from "./input.js";
import { CockpitStore } from "./store.js";
import { drawScene, type Draw2D } from "./render.js";

const INPUT_TICK_MS = 25;

function serviceUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const explicit = params.get("ws");
  if (explicit !== null) return explicit;
  const host = window.location.hostname || "127.0.0.1";
  const port = params.get("port") ?? "7420";
  return `ws://${host}:${port}/ws`;
}

function refreshPickers(
  store: CockpitStore,
  scenarioSelect: HTMLSelectElement,
  policySelect: HTMLSelectElement,
): void {
  const catalog = store.catalog;
  if (catalog === null) return;
  // pickers populate from the catalog message only
  const fill = (select: HTMLSelectElement, names: string[], active: string | null) => {
    const current = names.join("|");
    if (select.dataset.filled === current) {
      if (active !== null) select.value = active;
      return;
    }
    select.dataset.filled = current;
    select.innerHTML = "";
    for (const name of names) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
    if (active !== null) select.value = active;
  };
  fill(scenarioSelect, catalog.scenarios, store.selectedScenario);
  fill(policySelect, catalog.policies, store.selectedPolicy);
}

export function start(): void {
  const canvas = document.getElementById("arena") as HTMLCanvasElement;
  const scenarioSelect = document.getElementById("scenario") as HTMLSelectElement;
  const policySelect = document.getElementById("policy") as HTMLSelectElement;
  const ctx = canvas.getContext("2d") as unknown as Draw2D;

  const store = new CockpitStore();
  const client = new CockpitClient(
    serviceUrl(),
    store,
    // Handler properties on the DOM socket are typed with event objects the
    // adapter never inspects, so the structural mismatch is cast away here.
    (url) => new WebSocket(url) as unknown as SocketLike,
  );
  const input = new InputLoop((msg) => {
    client.send(msg);
  });

  client.onFrame((frame) => {
    if (frame.type === "event") input.setFrozen(true);
    if (frame.type === "catalog") {
      input.setFrozen(false);
      refreshPickers(store, scenarioSelect, policySelect);
    }
  });
  client.connect();

  window.addEventListener("keydown", (event) => {
    if (event.repeat) return;
    if (event.code === "KeyR") {
      client.sendReset();
      input.setFrozen(false);
      return;
    }
    if (input.handleKeyCode(event.code, true)) {
      event.preventDefault();
      input.tick(performance.now());
    }
  });
  window.addEventListener("keyup", (event) => {
    if (input.handleKeyCode(event.code, false)) {
      event.preventDefault();
      input.tick(performance.now());
    }
  });
  window.setInterval(() => input.tick(performance.now()), INPUT_TICK_MS);

  scenarioSelect.addEventListener("change", () => {
    store.chooseScenario(scenarioSelect.value);
    client.send({ type: "select_scenario", scenario_name: scenarioSelect.value });
  });
  policySelect.addEventListener("change", () => {
    store.choosePolicy(policySelect.value);
    client.send({ type: "set_policy", policy_name: policySelect.value });
  });

  const resize = () => {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight - 40;
  };
  window.addEventListener("resize", resize);
  resize();

  const renderLoop = () => {
    drawScene(ctx, store, canvas.width, canvas.height);
    window.requestAnimationFrame(renderLoop);
  };
  window.requestAnimationFrame(renderLoop);
}

start();
