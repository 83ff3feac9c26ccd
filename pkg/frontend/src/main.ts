/**
 * Explorer wiring: scenario controls on the left, the color-coded front in
 * the middle, a detail panel on the right, and the price what-if slider
 * underneath. The page computes nothing itself; it renders what the
 * service returns and posts back the user's choices.
 */

import { ApiClient, ServiceError } from "./api.js";
import { paint } from "./canvas.js";
import { buildScenario, defaultControls } from "./controls.js";
import {
  buildScene, detailRows, pickMarker, show,
} from "./front-view.js";
import type { ColorDim, FrontPayload } from "./types.js";
import { PriceWhatIf } from "./what-if.js";

const client = new ApiClient("");
const state = defaultControls();
let colorDim: ColorDim = "wall";
let front: FrontPayload | null = null;
let frontJobId: string | null = null;
let overlay: FrontPayload | null = null;
let whatIf: PriceWhatIf | null = null;

const $ = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

function status(text: string): void {
  $("status").textContent = text;
}

function render(): void {
  const canvas = $<HTMLCanvasElement>("plot");
  const ctx = canvas.getContext("2d")!;
  if (!front) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  const budgetRaw = ($<HTMLInputElement>("whatif-budget")).value;
  const scene = buildScene(front, {
    colorDim,
    overlay,
    budget: budgetRaw ? Number(budgetRaw) : null,
    width: canvas.width,
    height: canvas.height,
  });
  paint(ctx, scene);
  const legend = $("legend");
  legend.innerHTML = "";
  for (const entry of scene.legend) {
    const li = document.createElement("li");
    const dot = document.createElement("span");
    dot.className = "dot";
    dot.style.background = entry.color;
    li.append(dot, entry.material);
    legend.appendChild(li);
  }
  canvas.onmousemove = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const hit = pickMarker(scene, ev.clientX - rect.left,
                           ev.clientY - rect.top);
    const panel = $("detail");
    panel.innerHTML = "";
    if (!hit) return;
    for (const [label, value] of detailRows(hit.point)) {
      const row = document.createElement("div");
      row.innerHTML = `<span>${label}</span><b>${value}</b>`;
      panel.appendChild(row);
    }
  };
}

async function loadMaterials(): Promise<void> {
  const { value } = await client.materials();
  const list = $("materials");
  for (const m of value.materials) {
    if (list.querySelector(`input[value="${m.name}"]`)) continue;
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.value = m.name;
    box.onchange = () => {
      if (box.checked) state.excluded.delete(m.name);
      else state.excluded.add(m.name);
    };
    label.append(box, `${m.name} (${m.class})`);
    list.appendChild(label);
  }
}

async function runSweep(): Promise<void> {
  state.budgetMin = Number($<HTMLInputElement>("budget-min").value);
  state.budgetMax = Number($<HTMLInputElement>("budget-max").value);
  state.steps = Number($<HTMLInputElement>("steps").value);
  const widthRaw = $<HTMLInputElement>("b-fo").value;
  state.foundationWidth = widthRaw ? Number(widthRaw) : null;
  state.linkBrickGrades = $<HTMLInputElement>("link-grades").checked;

  const scenario = buildScenario(state);
  status("submitting …");
  try {
    const job = await client.startPareto(
      scenario, state.budgetMin, state.budgetMax, state.steps);
    frontJobId = job.value.id;
    const finished = await client.awaitJob(job.value.id, (done, total) => {
      status(`solving: ${done} of ${total} budgets`);
    });
    if (finished.value.status !== "done" || !finished.value.result?.front) {
      status(`scenario is ${finished.value.status}`);
      front = finished.value.result?.front ?? null;
      render();
      return;
    }
    front = finished.value.result.front;
    overlay = null;
    status(`front ready: ${front.points.length} points, `
      + `${front.clusters.length} design families`);
    setupWhatIf();
    render();
  } catch (err) {
    // a rejected scenario carries its diagnostic verbatim
    status(err instanceof ServiceError ? err.detail : String(err));
  }
}

function setupWhatIf(): void {
  if (!front || !frontJobId) return;
  const select = $<HTMLSelectElement>("whatif-material");
  select.innerHTML = "";
  const walls = [...new Set(front.points.map(
    (p) => p.design.materials.wall))].sort();
  for (const name of walls) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    select.appendChild(opt);
  }
  whatIf = new PriceWhatIf(
    client, frontJobId, select.value,
    ({ overlay: shifted, overBudget }) => {
      overlay = shifted;
      $("whatif-note").textContent = overBudget.length
        ? `over budget after shift: ${overBudget.join(", ")}`
        : "";
      render();
    }, "wall");
  select.onchange = () => {
    whatIf = new PriceWhatIf(
      client, frontJobId!, select.value,
      ({ overlay: shifted, overBudget }) => {
        overlay = shifted;
        $("whatif-note").textContent = overBudget.length
          ? `over budget after shift: ${overBudget.join(", ")}`
          : "";
        render();
      }, "wall");
  };
  const slider = $<HTMLInputElement>("whatif-price");
  slider.oninput = () => {
    $("whatif-price-label").textContent = show(Number(slider.value));
    const budgetRaw = $<HTMLInputElement>("whatif-budget").value;
    whatIf?.slide(Number(slider.value),
                  budgetRaw ? Number(budgetRaw) : null);
  };
}

for (const dim of ["wall", "foundation", "roof", "cover"] as ColorDim[]) {
  $(`tab-${dim}`).onclick = () => {
    colorDim = dim;
    document.querySelectorAll(".tab").forEach((el) =>
      el.classList.toggle("active", el.id === `tab-${dim}`));
    render();
  };
}
$("run").onclick = () => void runSweep();
void loadMaterials();
