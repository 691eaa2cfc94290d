import { describe, expect, it } from "vitest";

import {
  Layout, Trace, distanceSeries, eventMarkers, fingerPath, gazePath,
  heatmapGrid, keyCenter, omissionCount,
} from "../src/model.js";

const layout: Layout = {
  name: "toy",
  keyboard_region: [0, 0.5, 1, 1],
  text_field_region: [0, 0, 1, 0.2],
  keys: [
    { label: "h", bounds: [0.0, 0.5, 0.2, 0.7] },
    { label: "i", bounds: [0.3, 0.5, 0.5, 0.7] },
    { label: "space", bounds: [0.0, 0.8, 0.9, 1.0] },
  ],
};

function trace(events: Trace["events"], finalText = "hi"): Trace {
  return {
    schema: "typesim/trace/1", phrase: "hi", level: 1, layout: "toy",
    seed: 0, events, final_text: finalText,
    total_time: events.length ? events[events.length - 1].t : 0,
    reward: 1, truncated: false,
  };
}

const zeroNoise = trace([
  { t: 0.03, kind: "fixation", target: "h" },
  { t: 0.3, kind: "touch", pos: [0.1, 0.6] },
  { t: 0.3, kind: "keypress", char: "h", pos: [0.1, 0.6] },
  { t: 0.53, kind: "fixation", target: "i" },
  { t: 0.7, kind: "touch", pos: [0.4, 0.6] },
  { t: 0.7, kind: "keypress", char: "i", pos: [0.4, 0.6] },
  { t: 1.0, kind: "submit" },
]);

describe("trajectory data", () => {
  it("finger polyline visits the touched key centers in order", () => {
    const path = fingerPath(zeroNoise);
    expect(path.map((p) => p.p)).toEqual([
      [0.1, 0.6], [0.1, 0.6], [0.4, 0.6], [0.4, 0.6]]);
    expect(path.map((p) => p.t)).toEqual([0.3, 0.3, 0.7, 0.7]);
  });

  it("gaze polyline resolves fixation targets to key centers", () => {
    const path = gazePath(zeroNoise, layout);
    expect(path.map((p) => p.p)).toEqual([[0.1, 0.6], [0.4, 0.6]]);
  });

  it("bounce markers sit on the duplicated key", () => {
    const tr = trace([
      { t: 0.3, kind: "keypress", char: "h", pos: [0.1, 0.6] },
      { t: 0.4, kind: "bounce", pos: [0.1, 0.6] },
      { t: 0.4, kind: "keypress", char: "h", pos: [0.1, 0.6] },
    ], "hh");
    const markers = eventMarkers(tr, layout);
    expect(markers).toHaveLength(1);
    expect(markers[0].kind).toBe("bounce");
    expect(markers[0].p).toEqual([0.1, 0.6]);
  });

  it("empty trace renders nothing and does not crash", () => {
    const tr = trace([], "");
    expect(fingerPath(tr)).toEqual([]);
    expect(gazePath(tr, layout)).toEqual([]);
    expect(eventMarkers(tr, layout)).toEqual([]);
    expect(distanceSeries(tr, layout).series).toEqual([]);
  });
});

describe("heatmap data", () => {
  it("a single touch produces one hot cell", () => {
    const grid = heatmapGrid([[0.1, 0.6]], 10, 10);
    const flat = grid.flat();
    expect(flat.reduce((a, b) => a + b, 0)).toBe(1);
    expect(grid[6][1]).toBe(1);
  });

  it("near-uniform points fill the grid evenly", () => {
    const pts: [number, number][] = [];
    for (let i = 0; i < 20; i++) {
      for (let j = 0; j < 20; j++) {
        pts.push([(i + 0.5) / 20, (j + 0.5) / 20]);
      }
    }
    const grid = heatmapGrid(pts, 20, 20);
    expect(Math.max(...grid.flat())).toBe(1);
    expect(Math.min(...grid.flat())).toBe(1);
  });

  it("out-of-range points clamp into edge cells", () => {
    const grid = heatmapGrid([[1.2, -0.3]], 4, 4);
    expect(grid[0][3]).toBe(1);
  });
});

describe("time series data", () => {
  it("finger distance touches zero at each keypress of a clean trace", () => {
    const { series, keypressTimes } = distanceSeries(zeroNoise, layout);
    expect(keypressTimes).toEqual([0.3, 0.7]);
    for (const t of keypressTimes) {
      const at = series.filter((s) => Math.abs(s.t - t) < 1e-9);
      expect(at.length).toBeGreaterThan(0);
      expect(Math.min(...at.map((s) => s.finger))).toBeLessThan(1e-9);
    }
  });

  it("series samples at 50ms plus event boundaries", () => {
    const { series, keypressTimes } = distanceSeries(zeroNoise, layout);
    const span = keypressTimes[keypressTimes.length - 1];
    expect(series.length).toBeGreaterThanOrEqual(Math.floor(span / 0.05));
    const times = series.map((s) => s.t);
    expect([...times].sort((a, b) => a - b)).toEqual(times);
  });
});

describe("derived counts", () => {
  it("counts lapse events as omissions", () => {
    const tr = trace([
      { t: 0.1, kind: "lapse", char: "h" },
      { t: 0.3, kind: "keypress", char: "i", pos: [0.4, 0.6] },
    ], "i");
    expect(omissionCount(tr)).toBe(1);
  });

  it("keyCenter rejects unknown labels", () => {
    expect(() => keyCenter(layout, "zz")).toThrow(/unknown/);
  });
});
