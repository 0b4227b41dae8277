// Browser wiring: panels with sliders, toggles, charts, lock flow, export.

import { HttpServiceClient, RefitScheduler, ServiceError } from "./api.js";
import { curvePoints, pathFor } from "./chart.js";
import { WorkbenchState } from "./state.js";
import { renderDisplay } from "./view.js";

const SERVICE_URL = (window as unknown as { LIQUIDCARD_SERVICE?: string }).LIQUIDCARD_SERVICE ?? "http://127.0.0.1:8000";

const client = new HttpServiceClient(SERVICE_URL);
let state: WorkbenchState | null = null;
let scheduler: RefitScheduler | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function displayText(id: string): string {
  if (!state) return "";
  const item = renderDisplay(state).find((d) => d.id === id);
  return item ? item.text : "";
}

function redraw(): void {
  if (!state) return;
  const current = state;
  const readouts = document.getElementById("readouts")!;
  readouts.textContent = "";
  const lines: [string, string][] = [
    ["baseline dev / val", `${displayText("baseline-dev")} / ${displayText("baseline-val")}`],
    ["current dev / val", `${displayText("current-dev")} / ${displayText("current-val")}`],
    ["val delta vs baseline", displayText("val-delta")],
    ["suggestion", displayText("suggestion")],
    ["final val", displayText("final-val")],
  ];
  for (const [label, value] of lines) {
    if (!value) continue;
    const row = el("div", { class: "readout" });
    row.append(el("span", { class: "label" }, label), el("span", { class: "value" }, value));
    readouts.append(row);
  }

  const panels = document.getElementById("panels")!;
  panels.textContent = "";
  for (const panel of current.panels.values()) {
    const card = el("section", { class: "panel" + (panel.locked ? " locked" : "") });
    const head = el("header");
    head.append(el("h2", {}, panel.name));
    head.append(
      el(
        "span",
        { class: "badge" },
        panel.locked ? "locked" : `contribution ${displayText(`contribution-${panel.name}`)}`,
      ),
    );
    card.append(head);

    if (panel.banner) card.append(el("p", { class: "banner" }, panel.banner));

    if (panel.hasLiquid) {
      const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
      svg.setAttribute("viewBox", "0 0 420 180");
      const box = { width: 420, height: 180, pad: 12 };
      if (panel.ghostCurve) {
        const [gx, gy] = curvePoints(panel.ghostCurve, panel.logAxis);
        const ghost = document.createElementNS("http://www.w3.org/2000/svg", "path");
        ghost.setAttribute("d", pathFor(gx, gy, box));
        ghost.setAttribute("class", "ghost");
        svg.append(ghost);
      }
      if (panel.curve) {
        const [cx, cy] = curvePoints(panel.curve, panel.logAxis);
        const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
        path.setAttribute("d", pathFor(cx, cy, box));
        path.setAttribute("class", "curve");
        svg.append(path);
      }
      card.append(svg);

      const slider = el("input", {
        type: "range",
        min: "0",
        max: String(current.detents.length - 1),
        step: "1",
        value: String(panel.detentIndex),
      }) as HTMLInputElement;
      if (panel.locked) slider.disabled = true;
      slider.addEventListener("input", () => sweep(panel.name, Number(slider.value)));
      const sliderRow = el("div", { class: "slider-row" });
      sliderRow.append(slider, el("span", { class: "detent" }, current.detents[panel.detentIndex].label));
      card.append(sliderRow);

      const controls = el("div", { class: "controls" });
      if (panel.xscale === "log1p") {
        const axis = el("button", {}, panel.logAxis ? "x: log(x+1)" : "x: natural");
        axis.addEventListener("click", () => {
          current.toggleAxis(panel.name);
          redraw();
        });
        controls.append(axis);
      }
      const patternSelect = el("select") as HTMLSelectElement;
      for (const option of ["none", "ascending", "descending"]) {
        const node = el("option", { value: option }, option);
        if (option === panel.pattern) node.setAttribute("selected", "selected");
        patternSelect.append(node);
      }
      patternSelect.disabled = panel.locked;
      patternSelect.addEventListener("change", () => sweepPattern(panel.name, patternSelect.value));
      controls.append(patternSelect);

      const lockButton = el("button", {}, "lock");
      lockButton.disabled = panel.locked;
      lockButton.addEventListener("click", () => lock(panel.name));
      controls.append(lockButton);
      card.append(controls);
    } else {
      card.append(el("p", { class: "note" }, "discrete only; nothing to smooth"));
    }
    panels.append(card);
  }

  const traceList = document.getElementById("trace")!;
  traceList.textContent = "";
  for (const entry of current.locksLog) {
    traceList.append(el("li", {}, displayText(`lock-${entry.characteristic}`)));
  }
  (document.getElementById("export") as HTMLButtonElement).disabled = current.locksLog.length === 0;
}

function sweep(name: string, detentIndex: number): void {
  if (!state || !scheduler) return;
  const current = state;
  const previous = current.beginSweep(name, detentIndex);
  redraw();
  scheduler.schedule(
    name,
    { lambda2: { [name]: current.detents[detentIndex].value } },
    (response) => {
      current.applyRefit(name, response);
      redraw();
    },
    (err) => {
      const message = err instanceof ServiceError ? `${err.body.code}: ${err.body.message}` : String(err);
      current.applyRefitError(name, message, previous);
      redraw();
    },
  );
}

function sweepPattern(name: string, pattern: string): void {
  if (!state || !scheduler) return;
  const current = state;
  current.panel(name).pattern = pattern;
  scheduler.schedule(
    name,
    { patterns: { [name]: pattern } },
    (response) => {
      current.applyRefit(name, response);
      redraw();
    },
    (err) => {
      const message = err instanceof ServiceError ? `${err.body.code}: ${err.body.message}` : String(err);
      current.applyRefitError(name, message, current.panel(name).detentIndex);
      redraw();
    },
  );
}

async function lock(name: string): Promise<void> {
  if (!state) return;
  const current = state;
  const lambda2 = current.detents[current.panel(name).detentIndex].value;
  try {
    const response = await client.lock(current.sessionId, name, lambda2);
    current.applyLock(response);
  } catch (err) {
    const message = err instanceof ServiceError ? `${err.body.code}: ${err.body.message}` : String(err);
    current.applyRefitError(name, message, current.panel(name).detentIndex);
  }
  redraw();
}

function exportReport(): void {
  if (!state) return;
  const doc = JSON.stringify(state.buildExport(), null, 2);
  const blob = new Blob([doc], { type: "application/json" });
  const anchor = el("a", { href: URL.createObjectURL(blob), download: "tune_report.json" });
  anchor.click();
}

async function start(): Promise<void> {
  const form = document.getElementById("session-form") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const datasetPath = (document.getElementById("dataset-path") as HTMLInputElement).value;
    const modelText = (document.getElementById("model-json") as HTMLTextAreaElement).value;
    const seed = Number((document.getElementById("seed") as HTMLInputElement).value || "0");
    try {
      const created = await client.createSession({
        model: JSON.parse(modelText),
        dataset_path: datasetPath,
        split: { val_fraction: 0.25, seed },
      });
      state = new WorkbenchState(created);
      scheduler = new RefitScheduler(client, created.session_id);
      document.getElementById("setup")!.classList.add("hidden");
      document.getElementById("workbench")!.classList.remove("hidden");
      redraw();
    } catch (err) {
      const target = document.getElementById("setup-error")!;
      target.textContent =
        err instanceof ServiceError ? `${err.body.code}: ${err.body.message}` : String(err);
    }
  });
  document.getElementById("export")!.addEventListener("click", exportReport);
}

if (typeof document !== "undefined" && document.getElementById("session-form")) {
  void start();
}
