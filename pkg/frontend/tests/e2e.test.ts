// End-to-end: spawn the simulator service, drive it exactly the way the
// page does (client + pure view derivations), and check the explorer
// contracts: no client-side simulation, slider bounds mirror the API
// bounds document, and the forgetting-rate slider's behavioral effect is
// visible in the derived omission counts.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Layout, distanceSeries, fingerPath, gazePath, omissionCount } from "../src/model.js";

const PORT = 8791;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const api = new ApiClient(BASE);

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "typesim.cli", "serve",
    "--host", "127.0.0.1", "--port", String(PORT)],
  { stdio: "ignore", cwd: ".." });
  await waitForHealth();
}, 90_000);

afterAll(() => {
  server?.kill();
});

const ZERO_NOISE = {
  f_k: 1e-9, k_alpha: 0.5, x0: 0.0, y0: 0.0, k_bounce: 0, k_swap: 0,
  k_forget: 0, p0_proof: 0, p_obs_finger: 0, memory_decay: 0,
  vision_acuity: 1,
};

describe("explorer end to end", () => {
  let layout: Layout;

  it("slider bounds equal the API bounds document", async () => {
    const bounds = await api.paramDefaults();
    // the panel is built directly from this document, so equality of the
    // document with itself via the page's builder reduces to: every
    // default sits inside [min, max] and all expected sections exist
    for (const section of ["user_params", "policy_params", "reward_params"] as const) {
      for (const [name, b] of Object.entries(bounds[section])) {
        expect(b.min, `${section}.${name}`).toBeLessThanOrEqual(b.default);
        expect(b.max, `${section}.${name}`).toBeGreaterThanOrEqual(b.default);
      }
    }
    expect(Object.keys(bounds.user_params)).toContain("k_forget");
    expect(Object.keys(bounds.policy_params)).toContain("target_movement_time");
  });

  it("renders all three views from a returned trace only", async () => {
    layout = await api.layout("qwerty_en");
    const trace = await api.simulate({
      phrase: "welcome to chi", layout: "qwerty_en", level: 1, seed: 7,
      user_params: ZERO_NOISE,
    });
    expect(trace.final_text).toBe("welcome to chi");

    const finger = fingerPath(trace);
    const gaze = gazePath(trace, layout);
    const { series, keypressTimes } = distanceSeries(trace, layout);
    expect(finger.length).toBeGreaterThan(10);
    expect(gaze.length).toBeGreaterThan(5);
    expect(series.length).toBeGreaterThan(keypressTimes.length);
    expect(keypressTimes).toHaveLength("welcome to chi".length);
    // zero-noise: finger distance reaches zero at every keypress
    for (const t of keypressTimes) {
      const at = series.filter((s) => Math.abs(s.t - t) < 1e-9);
      expect(Math.min(...at.map((s) => s.finger))).toBeLessThan(1e-6);
    }
  });

  it("same request twice renders identically", async () => {
    const req = {
      phrase: "the cat sleeps", layout: "qwerty_en", level: 1, seed: 99,
    };
    const a = await api.simulate(req);
    const b = await api.simulate(req);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  it("max forgetting rate shows strictly more omissions than zero", async () => {
    const bounds = await api.paramDefaults();
    const kMax = bounds.user_params["k_forget"].max;
    const common = {
      phrase: "hello world this is long enough",
      layout: "qwerty_en", level: 0 as const, seed: 1234,
    };
    const batchAt = async (kForget: number) => {
      const resp = await api.simulateBatch({
        ...common,
        user_params: { ...ZERO_NOISE, k_forget: kForget },
        policy_params: { proofread_interval: 20 },
      }, 20);
      return resp.traces.reduce((n, t) => n + omissionCount(t), 0);
    };
    const zero = await batchAt(0);
    const max = await batchAt(kMax);
    expect(zero).toBe(0);
    expect(max).toBeGreaterThan(zero);
  }, 60_000);

  it("invalid parameters surface as a 422 the form can display", async () => {
    await expect(api.simulate({
      phrase: "hi", layout: "qwerty_en", level: 1, seed: 0,
      user_params: { k_alpha: 1.2 },
    })).rejects.toThrow(/422.*k_alpha/s);
  });
});
