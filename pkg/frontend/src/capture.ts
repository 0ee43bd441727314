/**
 * Turns raw pointer and keyboard input into session events.
 *
 * Positions pass through unmodified: the engine owns all geometry,
 * smoothing included, and hold detection happens engine-side from the
 * timestamps. The only job here is ordering and monotonic integer time.
 */

import { encodeEvent, Modifier, SessionEventJson } from "./protocol.js";

export type EventSink = (event: SessionEventJson) => void;

export class InputCapture {
  private lastT = -1;
  private down = false;
  private modifiers: Modifier[] = [];

  constructor(
    private sink: EventSink,
    private clock: () => number = () => performance.now(),
  ) {}

  get pointerDown(): boolean {
    return this.down;
  }

  private stamp(): number {
    const t = Math.max(Math.round(this.clock()), this.lastT);
    this.lastT = t;
    return t;
  }

  private emit(event: Omit<SessionEventJson, "t">): SessionEventJson {
    const full = encodeEvent({ t: this.stamp(), ...event } as SessionEventJson);
    this.sink(full);
    return full;
  }

  pointerDownAt(x: number, y: number): void {
    if (this.down) return;
    this.down = true;
    this.emit({ kind: "pointer-down", pos: [x, y], mods: this.modifiers });
  }

  pointerMoveTo(x: number, y: number): void {
    if (!this.down) return;
    this.emit({ kind: "pointer-move", pos: [x, y], mods: this.modifiers });
  }

  pointerUpAt(x: number, y: number): void {
    if (!this.down) return;
    this.down = false;
    this.emit({ kind: "pointer-up", pos: [x, y], mods: this.modifiers });
  }

  /** Replace the held modifier set; emits a change even mid-stroke. */
  setModifiers(mods: Modifier[]): void {
    const next = [...new Set(mods)].sort();
    if (next.join() === this.modifiers.join()) return;
    this.modifiers = next;
    this.emit({ kind: "modifier-change", mods: next });
  }

  switchMode(mode: "create" | "control"): void {
    this.emit({ kind: "mode-switch", mode });
  }

  createCanvas(region: [number, number, number, number]): void {
    this.emit({ kind: "canvas-create", region: [...region] });
  }

  changeSelection(ids: string[]): void {
    this.emit({ kind: "selection-change", ids: [...ids] });
  }

  pickAttribute(path: string): void {
    this.emit({ kind: "attribute-pick", path });
  }
}
