/** Scenario form state and its mapping to the service scenario document. */

import type { ScenarioDoc } from "./types.js";

export interface ControlState {
  excluded: Set<string>;
  budgetMin: number;
  budgetMax: number;
  steps: number;
  foundationWidth: number | null;  // override for the B_fo parameter
  linkBrickGrades: boolean;
  fixWallMaterial: string | null;
}

export function defaultControls(): ControlState {
  return {
    excluded: new Set(),
    budgetMin: 4500,
    budgetMax: 9000,
    steps: 150,
    foundationWidth: null,
    linkBrickGrades: false,
    fixWallMaterial: null,
  };
}

export function buildScenario(state: ControlState): ScenarioDoc {
  const overrides: Record<string, number> = {};
  if (state.foundationWidth !== null) {
    overrides["B_fo"] = state.foundationWidth;
  }
  const rules: Record<string, unknown> = {};
  if (state.linkBrickGrades) rules["link_brick_grades"] = true;
  if (state.fixWallMaterial !== null) {
    rules["fix_wall_material"] = state.fixWallMaterial;
  }
  return {
    exclude_materials: [...state.excluded].sort(),
    param_overrides: overrides,
    rules,
    solver: {},
  };
}
