/**
 * Scene construction for the Pareto scatter.
 *
 * All layout happens here as pure data so tests can inspect exactly what
 * would be drawn. The renderer in canvas.ts only paints scenes. Displayed
 * text never reformats service numbers: labels go through `show`, which is
 * the plain JavaScript string of the payload value.
 */

import type { ColorDim, DesignDoc, FrontPayload, FrontPointDoc } from "./types.js";

/** Payload number -> displayed text, with no arithmetic or reformatting. */
export function show(value: number | string): string {
  return String(value);
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export interface Marker {
  x: number;         // data coordinates (service numbers, untouched)
  ee: number;
  px: number;        // pixel coordinates
  py: number;
  color: string;
  material: string;
  clusterLabel: string | null;  // set on the first point of each cluster
  point: FrontPointDoc;
}

export interface LegendEntry {
  material: string;
  color: string;
}

export interface Tick {
  pos: number;       // pixel position along the axis
  text: string;      // payload value, stringified verbatim
}

export interface VerticalLine {
  px: number;
  text: string;
}

export interface Scene {
  width: number;
  height: number;
  axisMode: "cost_vs_ee" | "area_vs_ee";
  xLabel: string;
  yLabel: string;
  markers: Marker[];
  overlay: Marker[];           // shifted front, when present
  legend: LegendEntry[];
  xTicks: Tick[];
  yTicks: Tick[];
  budgetLine: VerticalLine | null;
  empty: boolean;
}

export interface SceneOptions {
  colorDim: ColorDim;
  width?: number;
  height?: number;
  overlay?: FrontPayload | null;
  budget?: number | null;
  margin?: number;
}

function materialOf(design: DesignDoc, dim: ColorDim): string {
  return design.materials[dim];
}

/** Stable material -> color map across base front and overlay. */
export function colorMap(
  payload: FrontPayload, dim: ColorDim, overlay?: FrontPayload | null,
): Map<string, string> {
  const names: string[] = [];
  for (const source of [payload, overlay]) {
    if (!source) continue;
    for (const pt of source.points) {
      const name = materialOf(pt.design, dim);
      if (!names.includes(name)) names.push(name);
    }
  }
  names.sort();
  return new Map(names.map((n, i) => [n, PALETTE[i % PALETTE.length]]));
}

export function buildScene(
  payload: FrontPayload, options: SceneOptions,
): Scene {
  const width = options.width ?? 720;
  const height = options.height ?? 440;
  const margin = options.margin ?? 54;
  const overlayPayload = options.overlay ?? null;
  const dim = options.colorDim;

  const everyPoint = [
    ...payload.points,
    ...(overlayPayload ? overlayPayload.points : []),
  ];
  if (everyPoint.length === 0) {
    return {
      width, height, markers: [], overlay: [], legend: [],
      xTicks: [], yTicks: [], budgetLine: null, empty: true,
      axisMode: payload.axis_mode,
      xLabel: payload.axis_mode === "area_vs_ee"
        ? "floor area (m2)" : "cost (USD)",
      yLabel: "embodied energy (GJ)",
    };
  }

  const xs = everyPoint.map((p) => p.x);
  const ys = everyPoint.map((p) => p.ee_GJ);
  if (options.budget != null) xs.push(options.budget);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  const toPx = (x: number) =>
    margin + ((x - xMin) / xSpan) * (width - 2 * margin);
  const toPy = (y: number) =>
    height - margin - ((y - yMin) / ySpan) * (height - 2 * margin);

  const colors = colorMap(payload, dim, overlayPayload);

  // cluster labels pin to the cheapest point of each cluster
  const labelAt = new Map<number, string>();
  for (const cluster of payload.clusters) {
    let best: number | null = null;
    payload.points.forEach((pt, i) => {
      const d = pt.design;
      const key = [d.materials.wall, d.materials.foundation,
                   d.materials.roof, d.materials.cover];
      if (key.join("/") === cluster.materials.join("/")
          && d.n_slc === cluster.n_slc) {
        if (best === null || pt.x < payload.points[best].x) best = i;
      }
    });
    if (best !== null) labelAt.set(best, cluster.label);
  }

  const toMarkers = (pts: FrontPointDoc[], labels: boolean): Marker[] =>
    pts.map((pt, i) => ({
      x: pt.x,
      ee: pt.ee_GJ,
      px: toPx(pt.x),
      py: toPy(pt.ee_GJ),
      color: colors.get(materialOf(pt.design, dim)) ?? "#000",
      material: materialOf(pt.design, dim),
      clusterLabel: labels ? labelAt.get(i) ?? null : null,
      point: pt,
    }));

  // axis ticks reuse service numbers: the extremes of the plotted data
  const tickXs = [...new Set([xMin, xMax])];
  const tickYs = [...new Set([yMin, yMax])];

  return {
    width,
    height,
    axisMode: payload.axis_mode,
    xLabel: payload.axis_mode === "area_vs_ee"
      ? "floor area (m2)" : "cost (USD)",
    yLabel: "embodied energy (GJ)",
    markers: toMarkers(payload.points, true),
    overlay: overlayPayload ? toMarkers(overlayPayload.points, false) : [],
    legend: [...colors.entries()].map(([material, color]) =>
      ({ material, color })),
    xTicks: tickXs.map((x) => ({ pos: toPx(x), text: show(x) })),
    yTicks: tickYs.map((y) => ({ pos: toPy(y), text: show(y) })),
    budgetLine: options.budget != null
      ? { px: toPx(options.budget), text: show(options.budget) }
      : null,
    empty: false,
  };
}

/** Rows for the hover/detail panel; values are verbatim payload numbers. */
export function detailRows(pt: FrontPointDoc): [string, string][] {
  const d = pt.design;
  const rows: [string, string][] = [
    ["cost (USD)", show(d.cost_usd)],
    ["embodied energy (GJ)", show(d.ee_GJ)],
    ["wall", d.materials.wall],
    ["foundation", d.materials.foundation],
    ["roof", d.materials.roof],
    ["cover", d.materials.cover],
    ["roof slices", show(d.n_slc)],
    ["door width (m)", show(d.point.w_do)],
    ["window edge (m)", show(d.point.l_wi)],
    ["wall volume (m3)", show(d.derived.v_wa_tot_m3)],
    ["floor area (m2)", show(d.derived.floor_area_m2)],
  ];
  if (pt.alternates.length > 0) {
    rows.push(["alternates", show(pt.alternates.length)]);
  }
  return rows;
}

/** Nearest marker within a pixel radius, for hover selection. */
export function pickMarker(
  scene: Scene, px: number, py: number, radius = 12,
): Marker | null {
  let best: Marker | null = null;
  let bestDist = radius * radius;
  for (const m of [...scene.markers, ...scene.overlay]) {
    const d = (m.px - px) ** 2 + (m.py - py) ** 2;
    if (d <= bestDist) {
      best = m;
      bestDist = d;
    }
  }
  return best;
}

/**
 * Monotone polyline check: on cost fronts EE falls as spending grows; on
 * area fronts EE rises with the requested floor area.
 */
export function isMonotone(scene: Scene): boolean {
  const sorted = [...scene.markers].sort((a, b) => a.x - b.x);
  for (let i = 1; i < sorted.length; i++) {
    if (scene.axisMode === "cost_vs_ee"
        ? sorted[i].ee > sorted[i - 1].ee
        : sorted[i].ee < sorted[i - 1].ee) {
      return false;
    }
  }
  return true;
}
