// Single-page explorer: parameter panel on the left, analysis tabs on the
// right.  One request in flight at a time; Submit stays disabled while a
// simulation is pending.

import { ApiClient, SimulateRequest } from "./api.js";
import { Layout, ParamBounds, Trace, omissionCount } from "./model.js";
import { drawHeatmap, drawTimeseries, drawTrajectory } from "./views.js";

const api = new ApiClient("");

interface SliderSpec {
  section: "user_params" | "policy_params";
  name: string;
  min: number;
  max: number;
  value: number;
}

interface ExplorerState {
  bounds: ParamBounds | null;
  layouts: string[];
  layout: Layout | null;
  sliders: SliderSpec[];
  lastTrace: Trace | null;
  lastBatch: Trace[];
  pending: boolean;
}

const state: ExplorerState = {
  bounds: null, layouts: [], layout: null, sliders: [],
  lastTrace: null, lastBatch: [], pending: false,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function sliderRow(spec: SliderSpec): HTMLElement {
  const row = document.createElement("div");
  row.className = "slider-row";
  const label = document.createElement("label");
  label.textContent = spec.name;
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(spec.min);
  input.max = String(spec.max);
  input.step = String((spec.max - spec.min) / 200);
  input.value = String(spec.value);
  input.dataset.section = spec.section;
  input.dataset.name = spec.name;
  input.className = "param-slider";
  const value = document.createElement("span");
  value.className = "slider-value";
  value.textContent = Number(spec.value).toPrecision(3);
  input.addEventListener("input", () => {
    spec.value = Number(input.value);
    value.textContent = Number(input.value).toPrecision(3);
  });
  row.append(label, input, value);
  return row;
}

function buildPanel(bounds: ParamBounds): void {
  const host = el<HTMLDivElement>("sliders");
  host.innerHTML = "";
  state.sliders = [];
  const sections: ["user_params" | "policy_params", string][] = [
    ["user_params", "user capabilities"],
    ["policy_params", "strategy"],
  ];
  for (const [section, title] of sections) {
    const heading = document.createElement("h3");
    heading.textContent = title;
    host.appendChild(heading);
    for (const [name, b] of Object.entries(bounds[section])) {
      const spec: SliderSpec = {
        section, name, min: b.min, max: b.max, value: b.default,
      };
      state.sliders.push(spec);
      host.appendChild(sliderRow(spec));
    }
  }
}

function gatherRequest(): SimulateRequest | null {
  const phrase = el<HTMLInputElement>("phrase").value;
  const error = el<HTMLSpanElement>("form-error");
  if (!phrase.trim()) {
    error.textContent = "phrase must not be empty";
    return null;
  }
  error.textContent = "";
  const user_params: Record<string, number> = {};
  const policy_params: Record<string, number | boolean> = {};
  for (const s of state.sliders) {
    if (s.section === "user_params") user_params[s.name] = s.value;
    else policy_params[s.name] = s.name === "persistence"
      ? s.value >= 0.5 : s.value;
  }
  if (typeof policy_params["proofread_interval"] === "number") {
    policy_params["proofread_interval"] =
      Math.max(1, Math.round(policy_params["proofread_interval"] as number));
  }
  return {
    phrase,
    layout: el<HTMLSelectElement>("layout").value,
    level: Number(el<HTMLSelectElement>("level").value),
    seed: Number(el<HTMLInputElement>("seed").value) || 0,
    user_params,
    policy_params,
  };
}

function canvasCtx(id: string): [CanvasRenderingContext2D, number, number] {
  const canvas = el<HTMLCanvasElement>(id);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  return [ctx, canvas.width, canvas.height];
}

function renderAll(): void {
  if (!state.layout || !state.lastTrace) return;
  {
    const [ctx, w, h] = canvasCtx("view-trajectory");
    drawTrajectory(ctx, state.lastTrace, state.layout, w, h);
  }
  {
    const [ctx, w, h] = canvasCtx("view-heatmap");
    const traces = state.lastBatch.length ? state.lastBatch : [state.lastTrace];
    drawHeatmap(ctx, traces, state.layout, w, h);
  }
  {
    const [ctx, w, h] = canvasCtx("view-timeseries");
    drawTimeseries(ctx, state.lastTrace, state.layout, w, h);
  }
  const info = el<HTMLDivElement>("trace-info");
  const tr = state.lastTrace;
  const batchNote = state.lastBatch.length > 1
    ? ` | batch omissions: ${state.lastBatch.reduce((n, t) => n + omissionCount(t), 0)}`
    : "";
  info.textContent =
    `typed: "${tr.final_text}" in ${tr.total_time.toFixed(2)}s | `
    + `omissions(single): ${omissionCount(tr)}${batchNote}`;
}

function renderAggregate(agg: Record<string, { mean: number; sd: number }>): void {
  const host = el<HTMLTableSectionElement>("aggregate-body");
  host.innerHTML = "";
  for (const [metric, v] of Object.entries(agg)) {
    const row = document.createElement("tr");
    row.innerHTML = `<td>${metric}</td><td>${v.mean.toFixed(2)}</td>`
      + `<td>${v.sd.toFixed(2)}</td>`;
    host.appendChild(row);
  }
}

async function submit(): Promise<void> {
  if (state.pending) return;
  const req = gatherRequest();
  if (!req) return;
  const episodes = Math.max(1, Number(el<HTMLInputElement>("episodes").value) || 1);
  const button = el<HTMLButtonElement>("submit");
  state.pending = true;
  button.disabled = true;
  try {
    state.layout = await api.layout(req.layout);
    if (episodes === 1) {
      state.lastTrace = await api.simulate(req);
      state.lastBatch = [state.lastTrace];
      renderAggregate({});
    } else {
      const batch = await api.simulateBatch(req, episodes);
      state.lastBatch = batch.traces;
      state.lastTrace = batch.traces[0];
      renderAggregate(batch.aggregate);
    }
    renderAll();
  } catch (err) {
    el<HTMLSpanElement>("form-error").textContent = String(err);
  } finally {
    state.pending = false;
    button.disabled = false;
  }
}

function selectTab(name: string): void {
  for (const tab of ["trajectory", "heatmap", "timeseries"]) {
    el(`tab-${tab}`).classList.toggle("active", tab === name);
    el(`view-${tab}`).style.display = tab === name ? "block" : "none";
  }
}

async function boot(): Promise<void> {
  const button = el<HTMLButtonElement>("submit");
  const retry = el<HTMLButtonElement>("retry");
  try {
    state.bounds = await api.paramDefaults();
    state.layouts = await api.layouts();
  } catch (err) {
    el<HTMLSpanElement>("form-error").textContent =
      `API unreachable: ${String(err)}`;
    button.disabled = true;
    retry.style.display = "inline";
    return;
  }
  retry.style.display = "none";
  button.disabled = false;
  buildPanel(state.bounds);
  const layoutSel = el<HTMLSelectElement>("layout");
  layoutSel.innerHTML = "";
  for (const name of state.layouts) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    layoutSel.appendChild(opt);
  }
}

export function wire(): void {
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  el<HTMLButtonElement>("retry").addEventListener("click", () => void boot());
  for (const tab of ["trajectory", "heatmap", "timeseries"]) {
    el(`tab-${tab}`).addEventListener("click", () => selectTab(tab));
  }
  selectTab("trajectory");
  void boot();
}

if (typeof document !== "undefined" && document.getElementById("submit")) {
  wire();
}
