/**
 * Client view state, driven exclusively by engine effects.
 *
 * The highlight in particular never changes from local input: only a
 * selection-highlight effect coming back from the engine may set or clear
 * it, which is what keeps the client honest about who decides selections.
 */

import { Effect } from "./protocol.js";

export interface UiState {
  highlight: string | null;
  highlightKind: string | null;
  mode: string;
  dragging: string | null;
  stale: boolean; // a fresh snapshot is needed
  messages: string[];
}

export function initialState(mode = "control"): UiState {
  return { highlight: null, highlightKind: null, mode, dragging: null,
           stale: false, messages: [] };
}

const REFRESH_KINDS = new Set([
  "attribute-changed", "squidget-created", "squidget-deleted",
  "canvas-created", "undo", "redo", "drag-finished",
]);

export function applyEffects(state: UiState, effects: Effect[]): UiState {
  const next = { ...state, messages: [...state.messages] };
  for (const effect of effects) {
    switch (effect.kind) {
      case "selection-highlight":
        next.highlight = (effect.squidget as string | null) ?? null;
        next.highlightKind = (effect.squidget_kind as string | null) ?? null;
        break;
      case "mode-changed":
        next.mode = effect.mode as string;
        next.highlight = null;
        next.highlightKind = null;
        next.stale = true;
        break;
      case "drag-started":
        next.dragging = effect.squidget as string;
        break;
      case "drag-finished":
        next.dragging = null;
        break;
      case "error":
      case "warning":
        next.messages.push(`${effect.kind}: ${effect.message}`);
        break;
    }
    if (REFRESH_KINDS.has(effect.kind)) next.stale = true;
  }
  return next;
}
