/**
 * Wire types shared with the engine bridge.
 *
 * Inbound messages carry one serialized session event or a request;
 * outbound messages answer with the same sequence number. Sequence numbers
 * increase strictly per direction, which Sequencer enforces on both ends.
 */

export type EventKind =
  | "pointer-down"
  | "pointer-move"
  | "pointer-up"
  | "modifier-change"
  | "mode-switch"
  | "canvas-create"
  | "selection-change"
  | "attribute-pick";

export type Modifier = "select-first" | "translate" | "rotate" | "scale" | "shape-only";

export interface SessionEventJson {
  t: number;
  kind: EventKind;
  pos?: [number, number];
  mods?: Modifier[];
  mode?: string;
  region?: number[];
  ids?: string[];
  path?: string;
}

export interface Effect {
  kind: string;
  [key: string]: unknown;
}

export interface Snapshot {
  mode: string;
  selection: string[];
  pending: string | null;
  objects: { id: string; kind: string; contours: number[][][] }[];
  canvases: { id: string; region: number[][]; z: number }[];
  discrete: { id: string; canvas: string; curve: number[][] }[];
  continuous: { id: string; members: string[]; path: number[][]; weight: number }[];
  attributes: Record<string, Record<string, number>>;
}

export interface HelloMessage {
  seq: 0;
  hello: {
    scene_sha256: string;
    config_sha256: string;
    hold_ms: number;
    snapshot: Snapshot;
  };
}

export type Outbound =
  | { seq: number; event: SessionEventJson }
  | { seq: number; request: "snapshot" | "document" | "undo" | "redo" };

export type Inbound =
  | HelloMessage
  | { seq: number; effects: Effect[] }
  | { seq: number; snapshot: Snapshot }
  | { seq: number; document: string }
  | { seq: number; error: string };

/** Strictly increasing sequence numbers for one direction of the link. */
export class Sequencer {
  private last = 0;

  next(): number {
    this.last += 1;
    return this.last;
  }

  /** Validate a peer-announced number; throws on replay or reordering. */
  accept(seq: number): number {
    if (!Number.isInteger(seq) || seq <= this.last) {
      throw new Error(`sequence number ${seq} is not after ${this.last}`);
    }
    this.last = seq;
    return seq;
  }
}

export function encodeEvent(event: SessionEventJson): SessionEventJson {
  const out: SessionEventJson = { t: event.t, kind: event.kind };
  if (event.pos) out.pos = [event.pos[0], event.pos[1]];
  if (event.mods && event.mods.length > 0) out.mods = [...event.mods].sort();
  for (const key of ["mode", "region", "ids", "path"] as const) {
    const value = event[key];
    if (value !== undefined) (out as unknown as Record<string, unknown>)[key] = value;
  }
  return out;
}
