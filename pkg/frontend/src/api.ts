/**
 * Thin client for the optimization service.
 *
 * Every number shown anywhere in the UI originates from these payloads;
 * the client keeps the raw response text alongside the parsed object so
 * tests can checksum exactly what the service said.
 */

import type { FrontPayload, JobDoc, MaterialDoc, ScenarioDoc } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<{
  ok: boolean;
  status: number;
  text(): Promise<string>;
}>;

export class ServiceError extends Error {
  constructor(public status: number, public detail: string) {
    super(`service ${status}: ${detail}`);
  }
}

export interface Raw<T> {
  value: T;
  raw: string;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown):
      Promise<Raw<T>> {
    const resp = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? undefined
        : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const raw = await resp.text();
    if (!resp.ok) {
      let detail = raw;
      try {
        detail = JSON.parse(raw).detail ?? raw;
      } catch {
        // keep the raw body
      }
      throw new ServiceError(resp.status, detail);
    }
    return { value: JSON.parse(raw) as T, raw };
  }

  materials(): Promise<Raw<{ materials: MaterialDoc[] }>> {
    return this.request("GET", "/materials");
  }

  validateScenario(scenario: ScenarioDoc):
      Promise<Raw<{ fingerprint: string; materials: string[] }>> {
    return this.request("POST", "/scenario", scenario);
  }

  startPareto(scenario: ScenarioDoc, budgetMin: number, budgetMax: number,
              steps: number): Promise<Raw<JobDoc>> {
    return this.request("POST", "/pareto", {
      scenario, budget_min: budgetMin, budget_max: budgetMax, steps,
    });
  }

  startAreaSweep(scenario: ScenarioDoc, budget: number, areaMin: number,
                 areaMax: number, steps: number): Promise<Raw<JobDoc>> {
    return this.request("POST", "/area-sweep", {
      scenario, budget, area_min: areaMin, area_max: areaMax, steps,
    });
  }

  job(id: string): Promise<Raw<JobDoc>> {
    return this.request("GET", `/jobs/${id}`);
  }

  priceWhatIf(jobId: string, material: string, price: number,
              componentClass?: string): Promise<Raw<{ front: FrontPayload }>> {
    return this.request("POST", "/price-what-if", {
      job_id: jobId, material, price,
      component_class: componentClass ?? null,
    });
  }

  /**
   * Poll a job until it settles; reports progress along the way.
   * The returned payload is the final job document, untouched.
   */
  async awaitJob(
    id: string,
    onProgress?: (done: number, total: number) => void,
    intervalMs = 500,
    sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((r) => setTimeout(r, ms)),
  ): Promise<Raw<JobDoc>> {
    for (;;) {
      const job = await this.job(id);
      const { status, progress } = job.value;
      onProgress?.(progress.done, progress.total);
      if (status === "done" || status === "infeasible" || status === "failed") {
        return job;
      }
      await sleep(intervalMs);
    }
  }
}
