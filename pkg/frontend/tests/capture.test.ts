import { describe, expect, it } from "vitest";

import { InputCapture } from "../src/capture.js";
import { SessionEventJson } from "../src/protocol.js";

function harness(times: number[]) {
  const events: SessionEventJson[] = [];
  let i = 0;
  const capture = new InputCapture((e) => events.push(e), () => times[Math.min(i++, times.length - 1)]);
  return { capture, events };
}

describe("InputCapture", () => {
  it("produces down, moves, up in order", () => {
    const { capture, events } = harness([0, 5, 10, 15]);
    capture.pointerDownAt(1, 2);
    capture.pointerMoveTo(3, 4);
    capture.pointerMoveTo(5, 6);
    capture.pointerUpAt(7, 8);
    expect(events.map((e) => e.kind)).toEqual([
      "pointer-down", "pointer-move", "pointer-move", "pointer-up",
    ]);
    expect(events.map((e) => e.pos)).toEqual([[1, 2], [3, 4], [5, 6], [7, 8]]);
  });

  it("passes positions through without smoothing", () => {
    const { capture, events } = harness([0, 1, 2]);
    capture.pointerDownAt(0.123456, 9.87);
    capture.pointerMoveTo(0.123457, 9.88);
    expect(events[1].pos).toEqual([0.123457, 9.88]);
  });

  it("keeps timestamps integral and monotonic even if the clock stalls", () => {
    const { capture, events } = harness([10.6, 10.2, 9.9, 12.4]);
    capture.pointerDownAt(0, 0);
    capture.pointerMoveTo(1, 0);
    capture.pointerMoveTo(2, 0);
    capture.pointerUpAt(3, 0);
    const ts = events.map((e) => e.t);
    expect(ts.every((t) => Number.isInteger(t))).toBe(true);
    for (let i = 1; i < ts.length; i++) expect(ts[i]).toBeGreaterThanOrEqual(ts[i - 1]);
  });

  it("emits modifier changes mid-stroke", () => {
    const { capture, events } = harness([0, 1, 2, 3, 4]);
    capture.pointerDownAt(0, 0);
    capture.setModifiers(["rotate"]);
    capture.pointerMoveTo(1, 1);
    expect(events.map((e) => e.kind)).toEqual([
      "pointer-down", "modifier-change", "pointer-move",
    ]);
    expect(events[1].mods).toEqual(["rotate"]);
    expect(events[2].mods).toEqual(["rotate"]); // pointer events carry the held set
  });

  it("ignores redundant modifier updates and stray moves", () => {
    const { capture, events } = harness([0, 1, 2]);
    capture.setModifiers(["scale"]);
    capture.setModifiers(["scale"]);
    capture.pointerMoveTo(1, 1); // no stroke in progress
    expect(events.map((e) => e.kind)).toEqual(["modifier-change"]);
  });

  it("emits structured non-pointer events", () => {
    const { capture, events } = harness([0, 1, 2, 3]);
    capture.switchMode("create");
    capture.changeSelection(["egg", "s1"]);
    capture.createCanvas([0, 0, 10, 10]);
    capture.pickAttribute("lamp/shape/cone_angle");
    expect(events.map((e) => e.kind)).toEqual([
      "mode-switch", "selection-change", "canvas-create", "attribute-pick",
    ]);
    expect(events[0].mode).toBe("create");
    expect(events[1].ids).toEqual(["egg", "s1"]);
    expect(events[2].region).toEqual([0, 0, 10, 10]);
    expect(events[3].path).toBe("lamp/shape/cone_angle");
  });
});
