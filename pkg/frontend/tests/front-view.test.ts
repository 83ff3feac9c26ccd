import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  buildScene, colorMap, detailRows, isMonotone, pickMarker, show,
} from "../src/front-view.js";
import type { FrontPayload } from "../src/types.js";

const rawDefault = readFileSync(
  new URL("../fixtures/front_default.json", import.meta.url), "utf8");
const front = JSON.parse(rawDefault) as FrontPayload;

describe("default front rendering", () => {
  it("exposes the nine cluster labels in cost order", () => {
    const scene = buildScene(front, { colorDim: "wall" });
    const labels = scene.markers
      .filter((m) => m.clusterLabel !== null)
      .sort((a, b) => a.x - b.x)
      .map((m) => m.clusterLabel);
    expect(labels).toEqual(["A", "B", "C", "D", "E", "F", "G", "H", "I"]);
  });

  it("builds one legend entry per material of the color dimension", () => {
    const byWall = buildScene(front, { colorDim: "wall" });
    expect(byWall.legend.map((l) => l.material).sort())
      .toEqual(["Br2", "So2"]);
    const byFoundation = buildScene(front, { colorDim: "foundation" });
    expect(byFoundation.legend.map((l) => l.material)).toEqual(["Br2"]);
    const byRoof = buildScene(front, { colorDim: "roof" });
    expect(byRoof.legend.map((l) => l.material).sort()).toEqual(["Ba", "Wo"]);
    const byCover = buildScene(front, { colorDim: "cover" });
    expect(byCover.legend.map((l) => l.material).sort()).toEqual(["Ba", "Pl"]);
  });

  it("maps one color per material, consistently across dimensions", () => {
    const colors = colorMap(front, "wall");
    expect(new Set(colors.values()).size).toBe(colors.size);
  });

  it("keeps the rendered polyline monotone", () => {
    expect(isMonotone(buildScene(front, { colorDim: "wall" }))).toBe(true);
  });

  it("renders an explicit empty state for an empty front", () => {
    const empty: FrontPayload = {
      axis_mode: "cost_vs_ee", scenario_fingerprint: "x",
      points: [], clusters: [],
    };
    const scene = buildScene(empty, { colorDim: "wall" });
    expect(scene.empty).toBe(true);
    expect(scene.markers).toHaveLength(0);
  });

  it("picks the nearest marker within the hover radius", () => {
    const scene = buildScene(front, { colorDim: "wall" });
    const target = scene.markers[3];
    const hit = pickMarker(scene, target.px + 3, target.py - 3);
    expect(hit).not.toBeNull();
    expect(hit!.point).toBe(target.point);
    expect(pickMarker(scene, -100, -100)).toBeNull();
  });
});

describe("numbers pass through from the service byte for byte", () => {
  it("every displayed cost literal appears verbatim in the raw payload", () => {
    // the payload is canonically serialized; a displayed number must be
    // exactly the literal the service sent, not a client-side reformat
    for (const pt of front.points) {
      const shown = show(pt.design.cost_usd);
      expect(rawDefault).toContain(`"cost_usd":${shown}`);
      const ee = show(pt.design.ee_GJ);
      expect(rawDefault).toContain(`"ee_GJ":${ee}`);
    }
  });

  it("detail rows carry verbatim payload values", () => {
    const pt = front.points[0];
    const rows = new Map(detailRows(pt));
    expect(rows.get("cost (USD)")).toBe(show(pt.design.cost_usd));
    expect(rows.get("wall volume (m3)"))
      .toBe(show(pt.design.derived.v_wa_tot_m3));
    expect(rawDefault).toContain(
      `"v_wa_tot_m3":${rows.get("wall volume (m3)")}`);
    expect(rows.get("wall")).toBe(pt.design.materials.wall);
  });
});
