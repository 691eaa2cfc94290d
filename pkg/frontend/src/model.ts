// Trace and layout types mirroring the API's JSON documents, plus the pure
// derivations the three views draw from.  No simulation logic lives here:
// everything is computed from the trace and layout the server returned.

export interface TraceEvent {
  t: number;
  kind: string;
  char?: string;
  pos?: [number, number];
  target?: string;
  duration?: number;
  missed?: boolean;
  first?: string;
  second?: string;
  before?: string;
  after?: string;
}

export interface Trace {
  schema: string;
  phrase: string;
  level: number;
  layout: string;
  seed: number;
  events: TraceEvent[];
  final_text: string;
  total_time: number;
  reward: number;
  truncated: boolean;
  time_constants?: Record<string, number>;
  max_steps?: number;
}

export interface LayoutKey {
  label: string;
  bounds: [number, number, number, number];
}

export interface Layout {
  name: string;
  keyboard_region: [number, number, number, number];
  text_field_region: [number, number, number, number];
  keys: LayoutKey[];
}

export interface Bound {
  default: number;
  min: number;
  max: number;
}

export interface ParamBounds {
  user_params: Record<string, Bound>;
  policy_params: Record<string, Bound>;
  reward_params: Record<string, Bound>;
}

export type Point = [number, number];

export function keyCenter(layout: Layout, label: string): Point {
  const key = layout.keys.find((k) => k.label === label);
  if (!key) throw new Error(`unknown key label: ${label}`);
  const [x0, y0, x1, y1] = key.bounds;
  return [(x0 + x1) / 2, (y0 + y1) / 2];
}

export function textFieldCenter(layout: Layout): Point {
  const [x0, y0, x1, y1] = layout.text_field_region;
  return [(x0 + x1) / 2, (y0 + y1) / 2];
}

export function labelForChar(ch: string): string {
  return ch === " " ? "space" : ch;
}

/** Finger path: every touch position, in time order, with its event kind. */
export function fingerPath(trace: Trace): { t: number; p: Point; kind: string }[] {
  const out: { t: number; p: Point; kind: string }[] = [];
  for (const ev of trace.events) {
    if (ev.pos && (ev.kind === "touch" || ev.kind === "keypress"
      || ev.kind === "backspace" || ev.kind === "bounce")) {
      out.push({ t: ev.t, p: ev.pos, kind: ev.kind });
    }
  }
  return out;
}

/** Gaze path: fixation targets resolved to screen points. */
export function gazePath(trace: Trace, layout: Layout): { t: number; p: Point; target: string }[] {
  const out: { t: number; p: Point; target: string }[] = [];
  for (const ev of trace.events) {
    if (ev.kind !== "fixation" || !ev.target) continue;
    const p = ev.target === "text-field"
      ? textFieldCenter(layout) : keyCenter(layout, ev.target);
    out.push({ t: ev.t, p, target: ev.target });
  }
  return out;
}

/** Marker positions for error-related events shown on the trajectory. */
export function eventMarkers(trace: Trace, layout: Layout):
  { t: number; p: Point; kind: string }[] {
  const markers: { t: number; p: Point; kind: string }[] = [];
  let lastPos: Point | null = null;
  for (const ev of trace.events) {
    if (ev.pos) lastPos = ev.pos;
    if (ev.kind === "bounce" || ev.kind === "backspace") {
      if (ev.pos) markers.push({ t: ev.t, p: ev.pos, kind: ev.kind });
    } else if (ev.kind === "lapse" || ev.kind === "autocorrect") {
      markers.push({ t: ev.t, p: lastPos ?? [0.5, 0.5], kind: ev.kind });
    }
  }
  return markers;
}

export function countKind(trace: Trace, kind: string): number {
  return trace.events.filter((e) => e.kind === kind).length;
}

/** Omissions visible in a trace: dropped motor commands. */
export function omissionCount(trace: Trace): number {
  return countKind(trace, "lapse");
}

/** Accumulate a 2-d histogram over grid cells for heatmap rendering. */
export function heatmapGrid(points: Point[], nx: number, ny: number): number[][] {
  const grid: number[][] = Array.from({ length: ny }, () =>
    new Array(nx).fill(0));
  for (const [x, y] of points) {
    const ix = Math.min(nx - 1, Math.max(0, Math.floor(x * nx)));
    const iy = Math.min(ny - 1, Math.max(0, Math.floor(y * ny)));
    grid[iy][ix] += 1;
  }
  return grid;
}

export interface SeriesPoint {
  t: number;
  finger: number;
  gaze: number;
}

function dist(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/**
 * Key-by-key distances from finger and gaze to the next key to tap, over
 * time.  Sampled at event boundaries plus 50 ms interpolation between
 * them; vertical markers belong at each keypress time.
 */
export function distanceSeries(trace: Trace, layout: Layout): {
  series: SeriesPoint[];
  keypressTimes: number[];
} {
  const keypresses = trace.events.filter((e) => e.kind === "keypress");
  const keypressTimes = keypresses.map((e) => e.t);
  const finger = fingerPath(trace);
  const gaze = gazePath(trace, layout);
  if (keypresses.length === 0) return { series: [], keypressTimes };

  const fingerAt = interpolator(finger.map((f) => ({ t: f.t, p: f.p })),
    keyCenter(layout, "space"));
  const gazeAt = interpolator(gaze.map((g) => ({ t: g.t, p: g.p })),
    keyCenter(layout, "space"));

  // the "next key to tap" switches at each keypress
  const targets: { from: number; to: number; p: Point }[] = [];
  let prev = 0;
  for (const kp of keypresses) {
    const label = labelForChar(kp.char ?? " ");
    let center: Point;
    try {
      center = keyCenter(layout, label);
    } catch {
      center = kp.pos ?? [0.5, 0.5];
    }
    targets.push({ from: prev, to: kp.t, p: center });
    prev = kp.t;
  }

  const series: SeriesPoint[] = [];
  for (const seg of targets) {
    for (let t = seg.from; t < seg.to - 1e-9; t += 0.05) {
      series.push({ t, finger: dist(fingerAt(t), seg.p), gaze: dist(gazeAt(t), seg.p) });
    }
    series.push({ t: seg.to, finger: dist(fingerAt(seg.to), seg.p), gaze: dist(gazeAt(seg.to), seg.p) });
  }
  return { series, keypressTimes };
}

function interpolator(samples: { t: number; p: Point }[], initial: Point):
  (t: number) => Point {
  return (t: number) => {
    let before = { t: 0, p: initial };
    let after: { t: number; p: Point } | null = null;
    for (const s of samples) {
      if (s.t <= t) before = s;
      else { after = s; break; }
    }
    if (!after) return before.p;
    const span = after.t - before.t;
    if (span <= 0) return after.p;
    const w = (t - before.t) / span;
    return [before.p[0] + w * (after.p[0] - before.p[0]),
      before.p[1] + w * (after.p[1] - before.p[1])];
  };
}
