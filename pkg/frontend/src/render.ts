/**
 * Canvas drawing from an engine snapshot. Strictly read-only: the renderer
 * receives state and geometry and never talks back to the engine.
 *
 * The context is typed structurally with just the 2D calls used here, so
 * tests can pass a recording fake instead of a real canvas.
 */

import { Snapshot } from "./protocol.js";
import { UiState } from "./state.js";

export interface Draw2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  // unknown rather than string so a real CanvasRenderingContext2D (whose
  // style properties also admit gradients) satisfies the interface
  strokeStyle: unknown;
  fillStyle: unknown;
  lineWidth: number;
  globalAlpha: number;
  font: string;
}

const COLORS = {
  contour: "#666",
  canvas: "#7ec8ff",
  discrete: "#f5f5f5",
  continuous: "#ffd166",
  path: "#ef8354",
  highlight: "#27e1c1",
  stroke: "#35d0ff",
  text: "#ccc",
};

function polyline(ctx: Draw2D, points: number[][]): void {
  if (points.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(points[0][0], points[0][1]);
  for (let i = 1; i < points.length; i++) ctx.lineTo(points[i][0], points[i][1]);
  ctx.stroke();
}

function fillRegion(ctx: Draw2D, points: number[][]): void {
  if (points.length < 3) return;
  ctx.beginPath();
  ctx.moveTo(points[0][0], points[0][1]);
  for (let i = 1; i < points.length; i++) ctx.lineTo(points[i][0], points[i][1]);
  ctx.fill();
}

export function renderFrame(
  ctx: Draw2D,
  size: { width: number; height: number },
  snapshot: Snapshot | null,
  state: UiState,
  strokeInProgress: number[][],
): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, size.width, size.height);
  ctx.font = "13px sans-serif";
  ctx.fillStyle = COLORS.text;
  ctx.fillText(`mode: ${state.mode}`, 10, 18);
  if (!snapshot) return;

  ctx.globalAlpha = 0.18; // canvases read as translucent sheets
  ctx.fillStyle = COLORS.canvas;
  for (const canvas of snapshot.canvases) fillRegion(ctx, canvas.region);
  ctx.globalAlpha = 1;

  ctx.lineWidth = 1.5;
  for (const object of snapshot.objects) {
    ctx.strokeStyle = selectedColor(state, object.id, COLORS.contour);
    for (const contour of object.contours) polyline(ctx, contour);
  }

  for (const squidget of snapshot.discrete) {
    ctx.strokeStyle = selectedColor(state, squidget.id, COLORS.discrete);
    ctx.lineWidth = state.highlight === squidget.id ? 3 : 2;
    polyline(ctx, squidget.curve);
  }

  for (const squidget of snapshot.continuous) {
    ctx.strokeStyle = selectedColor(state, squidget.id, COLORS.path);
    ctx.lineWidth = state.highlight === squidget.id ? 3 : 1;
    polyline(ctx, squidget.path);
  }

  if (strokeInProgress.length > 1) {
    ctx.strokeStyle = COLORS.stroke;
    ctx.lineWidth = 2;
    polyline(ctx, strokeInProgress);
  }
}

function selectedColor(state: UiState, id: string, base: string): string {
  // highlight ids for implicit squidgets look like "<object>:<c>:<s>"
  const target = state.highlight;
  if (target === id || (target !== null && target.split(":")[0] === id)) {
    return COLORS.highlight;
  }
  return base;
}
