/** Wire types mirroring the optimization service JSON payloads. */

export type ColorDim = "wall" | "foundation" | "roof" | "cover";

export interface DesignDoc {
  materials: Record<ColorDim, string>;
  n_slc: number;
  n_re: number;
  x_e: number;
  x_wa: number;
  cost_usd: number;
  ee_GJ: number;
  point: Record<string, number>;
  derived: Record<string, number>;
  provenance: { seed: number; starts: number; engine: string };
}

export interface FrontPointDoc {
  x: number;
  ee_GJ: number;
  design: DesignDoc;
  alternates: DesignDoc[];
}

export interface ClusterDoc {
  label: string;
  materials: string[];
  n_slc: number;
  cost_range: number[];
  ee_range: number[];
  w_do_range: number[];
  l_wi_range: number[];
  v_wa_tot_range: number[];
}

export interface FrontPayload {
  axis_mode: "cost_vs_ee" | "area_vs_ee";
  scenario_fingerprint: string;
  price_overrides?: [string, string, number][];
  points: FrontPointDoc[];
  clusters: ClusterDoc[];
}

export interface MaterialDoc {
  name: string;
  grade: string;
  class: string;
  density_kg_m3: number;
  cost_usd_m3: number;
  ee_MJ_kg: number;
  sigma_allw_MPa: number | null;
  min_thickness_m: number | null;
}

export interface JobDoc {
  id: string;
  kind: string;
  scenario_fingerprint: string;
  status: "queued" | "running" | "done" | "infeasible" | "failed";
  progress: { done: number; total: number };
  result?: { status: string; front?: FrontPayload; design?: DesignDoc };
  error?: string;
}

export interface ScenarioDoc {
  exclude_materials: string[];
  param_overrides: Record<string, number>;
  rules: Record<string, unknown>;
  solver: Record<string, unknown>;
}
