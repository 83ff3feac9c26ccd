/** Paints a Scene onto a 2D canvas. Pure presentation; no data logic. */

import type { Scene } from "./front-view.js";

export function paint(ctx: CanvasRenderingContext2D, scene: Scene): void {
  const { width, height } = scene;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, width, height);

  if (scene.empty) {
    ctx.fillStyle = "#666";
    ctx.font = "16px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("no feasible designs for this scenario",
                 width / 2, height / 2);
    return;
  }

  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(40, 18, width - 58, height - 58);

  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  for (const tick of scene.xTicks) {
    ctx.fillText(tick.text, tick.pos, height - 22);
  }
  ctx.save();
  ctx.textAlign = "right";
  for (const tick of scene.yTicks) {
    ctx.fillText(tick.text, 38, tick.pos + 4);
  }
  ctx.restore();
  ctx.fillText(scene.xLabel, width / 2, height - 6);
  ctx.save();
  ctx.translate(12, height / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(scene.yLabel, 0, 0);
  ctx.restore();

  if (scene.budgetLine) {
    ctx.strokeStyle = "#d62728";
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(scene.budgetLine.px, 18);
    ctx.lineTo(scene.budgetLine.px, height - 40);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#d62728";
    ctx.fillText(`budget ${scene.budgetLine.text}`, scene.budgetLine.px, 14);
  }

  for (const m of scene.overlay) {
    ctx.strokeStyle = m.color;
    ctx.beginPath();
    ctx.arc(m.px, m.py, 5, 0, 2 * Math.PI);
    ctx.stroke();
  }
  for (const m of scene.markers) {
    ctx.fillStyle = m.color;
    ctx.beginPath();
    ctx.arc(m.px, m.py, 4, 0, 2 * Math.PI);
    ctx.fill();
    if (m.clusterLabel) {
      ctx.fillStyle = "#222";
      ctx.font = "bold 12px sans-serif";
      ctx.fillText(m.clusterLabel, m.px, m.py - 8);
      ctx.font = "12px sans-serif";
    }
  }
}
