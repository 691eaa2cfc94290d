// Thin typed client over the simulator's HTTP API.  The explorer never
// simulates anything itself; every view renders server responses.

import type { Layout, ParamBounds, Trace } from "./model.js";

export interface SimulateRequest {
  phrase: string;
  layout: string;
  level: number;
  seed: number;
  episodes?: number;
  user_params?: Record<string, number>;
  policy_params?: Record<string, number | boolean>;
  reward_params?: Record<string, number>;
}

export interface BatchResponse {
  traces: Trace[];
  aggregate: Record<string, { mean: number; sd: number }>;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new Error(`${path}: HTTP ${resp.status}`);
    return resp.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      const detail = await resp.text();
      throw new Error(`${path}: HTTP ${resp.status}: ${detail}`);
    }
    return resp.json() as Promise<T>;
  }

  health(): Promise<{ status: string }> {
    return this.get("/api/health");
  }

  layouts(): Promise<string[]> {
    return this.get("/api/layouts");
  }

  layout(name: string): Promise<Layout> {
    return this.get(`/api/layouts/${name}`);
  }

  paramDefaults(): Promise<ParamBounds> {
    return this.get("/api/params/defaults");
  }

  simulate(req: SimulateRequest): Promise<Trace> {
    return this.post("/api/simulate", { ...req, episodes: 1 });
  }

  simulateBatch(req: SimulateRequest, episodes: number): Promise<BatchResponse> {
    return this.post("/api/simulate", { ...req, episodes });
  }
}
