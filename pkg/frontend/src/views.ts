// Canvas renderers for the three linked views.  Each takes a 2d context
// and draws purely from trace/layout-derived data (see model.ts).

import {
  Layout, Trace, distanceSeries, eventMarkers, fingerPath, gazePath,
  heatmapGrid,
} from "./model.js";

export const FINGER_COLOR = "#1f6fd6";  // blue
export const GAZE_COLOR = "#d63a3a";    // red

type Ctx = CanvasRenderingContext2D;

export function drawKeyboard(ctx: Ctx, layout: Layout, w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, w, h);
  const [tx0, ty0, tx1, ty1] = layout.text_field_region;
  ctx.fillStyle = "#fff";
  ctx.strokeStyle = "#999";
  ctx.fillRect(tx0 * w, ty0 * h, (tx1 - tx0) * w, (ty1 - ty0) * h);
  ctx.strokeRect(tx0 * w, ty0 * h, (tx1 - tx0) * w, (ty1 - ty0) * h);
  ctx.font = `${Math.round(h / 36)}px sans-serif`;
  for (const key of layout.keys) {
    const [x0, y0, x1, y1] = key.bounds;
    ctx.fillStyle = "#fff";
    ctx.strokeStyle = "#bbb";
    ctx.fillRect(x0 * w, y0 * h, (x1 - x0) * w, (y1 - y0) * h);
    ctx.strokeRect(x0 * w, y0 * h, (x1 - x0) * w, (y1 - y0) * h);
    ctx.fillStyle = "#444";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    const label = key.label.length > 1 ? key.label.slice(0, 5) : key.label;
    ctx.fillText(label, ((x0 + x1) / 2) * w, ((y0 + y1) / 2) * h);
  }
}

export function drawTrajectory(ctx: Ctx, trace: Trace, layout: Layout,
  w: number, h: number): void {
  drawKeyboard(ctx, layout, w, h);
  const finger = fingerPath(trace);
  const gaze = gazePath(trace, layout);

  ctx.lineWidth = 2;
  ctx.strokeStyle = FINGER_COLOR;
  ctx.beginPath();
  finger.forEach((f, i) => {
    const [x, y] = f.p;
    if (i === 0) ctx.moveTo(x * w, y * h);
    else ctx.lineTo(x * w, y * h);
  });
  ctx.stroke();

  ctx.strokeStyle = GAZE_COLOR;
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  gaze.forEach((g, i) => {
    const [x, y] = g.p;
    if (i === 0) ctx.moveTo(x * w, y * h);
    else ctx.lineTo(x * w, y * h);
  });
  ctx.stroke();
  ctx.setLineDash([]);

  ctx.fillStyle = FINGER_COLOR;
  for (const f of finger) {
    ctx.beginPath();
    ctx.arc(f.p[0] * w, f.p[1] * h, 3, 0, Math.PI * 2);
    ctx.fill();
  }
  const markerColor: Record<string, string> = {
    bounce: "#e69f00", backspace: "#9400d3", lapse: "#2aa02a",
    autocorrect: "#00a0a0",
  };
  for (const m of eventMarkers(trace, layout)) {
    ctx.strokeStyle = markerColor[m.kind] ?? "#000";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(m.p[0] * w, m.p[1] * h, 7, 0, Math.PI * 2);
    ctx.stroke();
  }
}

export function drawHeatmap(ctx: Ctx, traces: Trace[], layout: Layout,
  w: number, h: number, cells = 48): void {
  drawKeyboard(ctx, layout, w, h);
  const fingerPts = traces.flatMap((t) => fingerPath(t).map((f) => f.p));
  const gazePts = traces.flatMap((t) => gazePath(t, layout).map((g) => g.p));
  const ny = Math.round(cells * (h / w));
  const paint = (grid: number[][], rgb: [number, number, number]) => {
    const peak = Math.max(1, ...grid.flat());
    const cw = w / cells;
    const ch = h / ny;
    grid.forEach((row, iy) => row.forEach((v, ix) => {
      if (v <= 0) return;
      const a = 0.15 + 0.75 * (v / peak);
      ctx.fillStyle = `rgba(${rgb[0]},${rgb[1]},${rgb[2]},${a.toFixed(3)})`;
      ctx.fillRect(ix * cw, iy * ch, cw, ch);
    }));
  };
  paint(heatmapGrid(fingerPts, cells, ny), [31, 111, 214]);
  paint(heatmapGrid(gazePts, cells, ny), [214, 58, 58]);
}

export function drawTimeseries(ctx: Ctx, trace: Trace, layout: Layout,
  w: number, h: number): void {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, w, h);
  const { series, keypressTimes } = distanceSeries(trace, layout);
  if (series.length === 0) return;
  const tMax = Math.max(series[series.length - 1].t, 1e-9);
  const dMax = Math.max(...series.map((s) => Math.max(s.finger, s.gaze)), 1e-9);
  const px = (t: number) => (t / tMax) * (w - 40) + 30;
  const py = (d: number) => h - 20 - (d / dMax) * (h - 40);

  ctx.strokeStyle = "#ddd";
  for (const t of keypressTimes) {
    ctx.beginPath();
    ctx.moveTo(px(t), 10);
    ctx.lineTo(px(t), h - 20);
    ctx.stroke();
  }
  const drawLine = (pick: (s: { finger: number; gaze: number }) => number,
    color: string) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    series.forEach((s, i) => {
      if (i === 0) ctx.moveTo(px(s.t), py(pick(s)));
      else ctx.lineTo(px(s.t), py(pick(s)));
    });
    ctx.stroke();
  };
  drawLine((s) => s.finger, FINGER_COLOR);
  drawLine((s) => s.gaze, GAZE_COLOR);
  ctx.fillStyle = "#444";
  ctx.textAlign = "left";
  ctx.font = "11px sans-serif";
  ctx.fillText("distance to next key (finger: blue, gaze: red)", 30, 12);
}
