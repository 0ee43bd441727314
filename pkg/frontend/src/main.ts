/**
 * Browser entry point: wires the capture, client, state and renderer
 * together around one canvas element.
 *
 * Keyboard map while drawing: Shift marks the first stroke of a pair,
 * T / R / S restrict the refinement to translate / rotate / scale, and A
 * selects by shape only. M toggles create and control mode, C arms a
 * canvas-drag, Z / Y undo and redo, and D downloads the recorded log.
 */

import { InputCapture } from "./capture.js";
import { EngineClient } from "./client.js";
import { Modifier, Snapshot } from "./protocol.js";
import { LogRecorder } from "./recorder.js";
import { renderFrame } from "./render.js";
import { applyEffects, initialState } from "./state.js";

const KEY_MODIFIERS: Record<string, Modifier> = {
  shift: "select-first",
  t: "translate",
  r: "rotate",
  s: "scale",
  a: "shape-only",
};

function start(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const status = document.getElementById("status") as HTMLElement;
  const ctx = canvas.getContext("2d")!;

  const socket = new WebSocket(`ws://${location.host}/ws`);
  const client = new EngineClient(socket as never);
  const recorder = new LogRecorder();
  const capture = new InputCapture((event) => {
    recorder.record(event);
    void client.sendEvent(event).then(async (effects) => {
      state = applyEffects(state, effects);
      if (state.stale) {
        snapshot = await client.requestSnapshot();
        state = { ...state, stale: false };
      }
      draw();
    });
  });

  let state = initialState();
  let snapshot: Snapshot | null = null;
  let stroke: number[][] = [];
  let held = new Set<string>();
  let canvasDrag: [number, number] | null = null;

  function draw(): void {
    renderFrame(ctx, canvas, snapshot, state, stroke);
    status.textContent = [
      `mode ${state.mode}`,
      state.highlight ? `selected ${state.highlight}` : "nothing selected",
      state.dragging ? `dragging ${state.dragging}` : "",
      state.messages[state.messages.length - 1] ?? "",
    ].filter(Boolean).join("  |  ");
  }

  void client.ready().then((hello) => {
    snapshot = hello.snapshot;
    state = { ...state, mode: hello.snapshot.mode };
    draw();
  });

  canvas.addEventListener("pointerdown", (e) => {
    if (held.has("c")) {
      canvasDrag = [e.offsetX, e.offsetY];
      return;
    }
    stroke = [[e.offsetX, e.offsetY]];
    capture.pointerDownAt(e.offsetX, e.offsetY);
  });
  canvas.addEventListener("pointermove", (e) => {
    if (canvasDrag) return;
    if (!capture.pointerDown) return;
    stroke.push([e.offsetX, e.offsetY]);
    capture.pointerMoveTo(e.offsetX, e.offsetY);
    draw();
  });
  canvas.addEventListener("pointerup", (e) => {
    if (canvasDrag) {
      const [x0, y0] = canvasDrag;
      canvasDrag = null;
      capture.createCanvas([x0, y0, e.offsetX, e.offsetY]);
      return;
    }
    if (!capture.pointerDown) return;
    capture.pointerUpAt(e.offsetX, e.offsetY);
    stroke = [];
    draw();
  });

  function syncModifiers(): void {
    const mods = [...held].map((k) => KEY_MODIFIERS[k]).filter(Boolean) as Modifier[];
    capture.setModifiers(mods);
  }

  window.addEventListener("keydown", (e) => {
    const key = e.key.toLowerCase();
    if (key === "m") {
      capture.switchMode(state.mode === "control" ? "create" : "control");
    } else if (key === "z") {
      void client.undo().then(() => client.requestSnapshot()).then((s) => {
        snapshot = s;
        draw();
      });
    } else if (key === "y") {
      void client.redo().then(() => client.requestSnapshot()).then((s) => {
        snapshot = s;
        draw();
      });
    } else if (key === "d") {
      const hello = client.hello;
      const text = recorder.toLog(hello?.scene_sha256 ?? "", hello?.config_sha256 ?? "");
      const blob = new Blob([text], { type: "application/jsonl" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "session.log.jsonl";
      link.click();
    } else {
      held.add(key);
      syncModifiers();
    }
  });
  window.addEventListener("keyup", (e) => {
    held.delete(e.key.toLowerCase());
    syncModifiers();
  });
}

window.addEventListener("DOMContentLoaded", start);
