"""The interaction state machine.

Events arrive in timestamp order and every transition is deterministic, so
a recorded event log replays to the exact same scene.  Create mode owns the
registry (canvases and explicit squidgets), control mode owns scene
attributes; neither touches the other's state.

Gesture precedence in create mode is total: a stroke crossing any curve at
least twice is a cross-out, otherwise a stroke crossing two or more
discrete curves exactly once each connects them, otherwise it creates a
discrete squidget.

In control mode a stroke selects and manipulates in one go unless the
select-first modifier marked it as the first of a pair, in which case the
match is parked until the next stroke supplies the manipulation.  Keeping
the pen still at the stroke end past the hold threshold applies the match
immediately and turns subsequent motion into live drag refinement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .errors import GestureError, SceneError, SessionError, SolveError
from .geometry import GeometryError, crossings, dedupe_points
from .matching import MatchResult, match_continuous, match_implicit, select
from .registry import Canvas, ContinuousSquidget, DiscreteSquidget, SquidgetRegistry
from .scene import AttributeChange, Scene, parse_path, path_str
from .solver import (
    AttributeUpdate,
    DragState,
    apply_continuous,
    apply_discrete,
    apply_implicit_transform,
    drag_update,
    solve_scalar,
    start_drag,
)

EVENT_KINDS = (
    "pointer-down", "pointer-move", "pointer-up", "modifier-change",
    "mode-switch", "canvas-create", "selection-change", "attribute-pick",
)
MODIFIERS = ("select-first", "translate", "rotate", "scale", "shape-only")
MODES = ("create", "control")


@dataclass
class SessionEvent:
    """One serialized input event; position is in screen units."""

    timestamp: int
    kind: str
    position: tuple[float, float] | None = None
    modifiers: frozenset[str] = frozenset()
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        record: dict = {"t": int(self.timestamp), "kind": self.kind}
        if self.position is not None:
            record["pos"] = [float(self.position[0]), float(self.position[1])]
        if self.modifiers:
            record["mods"] = sorted(self.modifiers)
        for key in sorted(self.data):
            record[key] = self.data[key]
        return record

    @classmethod
    def from_json(cls, record: dict) -> "SessionEvent":
        data = {k: v for k, v in record.items() if k not in ("t", "kind", "pos", "mods")}
        pos = record.get("pos")
        return cls(
            timestamp=int(record["t"]),
            kind=record["kind"],
            position=(float(pos[0]), float(pos[1])) if pos is not None else None,
            modifiers=frozenset(record.get("mods", ())),
            data=data,
        )


# undo entries are lists of these atoms, replayed in reverse on undo
@dataclass
class UndoAtom:
    op: str  # "attr" | "registry-add" | "registry-remove"
    change: AttributeChange | None = None
    payload: object | None = None


class Session:
    """Single logical event loop over one scene and registry."""

    def __init__(self, scene: Scene, registry: SquidgetRegistry,
                 config: EngineConfig | None = None):
        self.scene = scene
        self.registry = registry
        self.config = config or registry.config
        registry.attach(scene)

        self.mode = "control"
        self.selection: list[str] = []
        self.pending: MatchResult | None = None
        self.picked_attr = None

        self._last_ts: int | None = None
        self._pointer_down = False
        self._stroke: list[tuple[float, float]] = []
        self._stroke_mods: set[str] = set()
        self._modifiers: set[str] = set()
        self._anchor_pos: np.ndarray | None = None
        self._anchor_ts = 0
        self._hold_fired = False
        self._drag: DragState | None = None
        self._action: list[UndoAtom] | None = None  # open undo buffer during a drag

        self.undo_stack: list[list[UndoAtom]] = []
        self.redo_stack: list[list[UndoAtom]] = []

    # -- event entry point ------------------------------------------------------

    def handle(self, event: SessionEvent) -> list[dict]:
        """Process one event; raises SessionError on malformed input."""
        if event.kind not in EVENT_KINDS:
            raise SessionError(f"unknown event kind: {event.kind}")
        if self._last_ts is not None and event.timestamp < self._last_ts:
            raise SessionError("timestamps must be non-decreasing")
        if event.kind in ("pointer-move", "pointer-up") and not self._pointer_down:
            raise SessionError(f"{event.kind} without pointer-down")
        if event.kind == "pointer-down" and self._pointer_down:
            raise SessionError("pointer-down while already down")
        if event.kind.startswith("pointer") and event.position is None:
            raise SessionError(f"{event.kind} needs a position")
        self._last_ts = event.timestamp

        handler = {
            "pointer-down": self._on_down,
            "pointer-move": self._on_move,
            "pointer-up": self._on_up,
            "modifier-change": self._on_modifiers,
            "mode-switch": self._on_mode,
            "canvas-create": self._on_canvas_create,
            "selection-change": self._on_selection,
            "attribute-pick": self._on_pick,
        }[event.kind]
        return handler(event)

    # -- pointer flow -------------------------------------------------------------

    def _on_down(self, ev: SessionEvent) -> list[dict]:
        self._pointer_down = True
        self._stroke = [ev.position]
        self._stroke_mods = set(self._modifiers) | set(ev.modifiers)
        self._anchor_pos = np.asarray(ev.position, dtype=float)
        self._anchor_ts = ev.timestamp
        self._hold_fired = False
        return []

    def _on_move(self, ev: SessionEvent) -> list[dict]:
        self._stroke.append(ev.position)
        self._stroke_mods |= set(ev.modifiers)
        pos = np.asarray(ev.position, dtype=float)
        if self._drag is not None:
            return self._drag_step(pos)
        if float(np.hypot(*(pos - self._anchor_pos))) > self.config.hold_radius:
            self._anchor_pos = pos
            self._anchor_ts = ev.timestamp
            self._hold_fired = False
        elif (self.mode == "control" and not self._hold_fired
              and ev.timestamp - self._anchor_ts >= self.config.hold_ms):
            self._hold_fired = True
            return self._trigger_hold()
        return []

    def _on_up(self, ev: SessionEvent) -> list[dict]:
        self._stroke.append(ev.position)
        self._stroke_mods |= set(ev.modifiers)
        self._pointer_down = False
        stroke = self._stroke
        mods = self._stroke_mods
        self._stroke = []
        self._stroke_mods = set()
        if self._drag is not None:
            self._drag = None
            self._close_action()
            return [{"kind": "drag-finished"}]
        if self._hold_fired:
            return []  # the hold already consumed this stroke
        if len(dedupe_points(stroke)) < 2:
            return []  # a tap, nothing to match
        if self.mode == "create":
            return self._create_stroke(stroke)
        return self._control_stroke(stroke, mods)

    # -- control mode ----------------------------------------------------------------

    def _constraint(self, mods: set[str]) -> str:
        if "translate" in mods:
            return "translate"
        if "rotate" in mods:
            return "rotate"
        if "scale" in mods:
            return "scale"
        return "full"

    def _control_stroke(self, stroke, mods: set[str]) -> list[dict]:
        if "select-first" in mods:
            match = select(stroke, self.registry, self.scene, self.config,
                           shape_only=True)
            self.pending = match
            sid = match.squidget_id if match else None
            return [{"kind": "selection-highlight", "squidget": sid,
                     "squidget_kind": match.kind if match else None}]
        if self.pending is not None:
            match, effects = self._rematch_pending(stroke)
            self.pending = None
            if match is None:
                return effects
        else:
            match = select(stroke, self.registry, self.scene, self.config,
                           shape_only=self.config.shape_only_default)
            effects = []
            if match is None:
                return [{"kind": "selection-highlight", "squidget": None,
                         "squidget_kind": None}]
        effects.append({"kind": "selection-highlight", "squidget": match.squidget_id,
                        "squidget_kind": match.kind})
        update, error = self._apply_match(match, stroke, mods)
        if error:
            effects.append({"kind": "error", "message": error})
            return effects
        self._push_update(update)
        effects.extend(self._update_effects(update))
        return effects

    def _rematch_pending(self, stroke) -> tuple[MatchResult | None, list[dict]]:
        """Resolve the parked selection against the manipulation stroke."""
        parked = self.pending
        try:
            if parked.kind == "discrete":
                return parked, []
            if parked.kind == "continuous":
                cs = self.registry.continuous.get(parked.squidget_id)
                if cs is None:
                    return None, [{"kind": "error", "message": "pending squidget vanished"}]
                w, dist = match_continuous(stroke, cs, self.registry, self.scene)
                return MatchResult(parked.squidget_id, "continuous", dist, parked.score,
                                   w=w), []
            refreshed = match_implicit(stroke, parked.candidate, self.scene, self.config)
            if refreshed is None:
                return None, [{"kind": "error", "message": "stroke does not fit the "
                                                           "pending squidget"}]
            return refreshed, []
        except GeometryError as exc:
            return None, [{"kind": "error", "message": str(exc)}]

    def _apply_match(self, match: MatchResult, stroke,
                     mods: set[str]) -> tuple[AttributeUpdate | None, str | None]:
        try:
            if match.kind == "discrete":
                return apply_discrete(match, self.registry, self.scene), None
            if match.kind == "continuous":
                return apply_continuous(match, self.registry, self.scene), None
            if self.picked_attr is not None:
                path = self.picked_attr
                self.picked_attr = None
                return solve_scalar(stroke, match.candidate, path, self.scene,
                                    self.registry), None
            constraint = self._constraint(mods)
            return apply_implicit_transform(match, self.scene, constraint), None
        except (SceneError, SolveError, GeometryError) as exc:
            return None, str(exc)

    def _trigger_hold(self) -> list[dict]:
        stroke = list(self._stroke)
        mods = set(self._stroke_mods)
        if len(dedupe_points(stroke)) < 2:
            return []
        if self.pending is not None:
            match, effects = self._rematch_pending(stroke)
            self.pending = None
            if match is None:
                return effects
        else:
            match = select(stroke, self.registry, self.scene, self.config,
                           shape_only=self.config.shape_only_default)
            if match is None:
                return [{"kind": "selection-highlight", "squidget": None,
                         "squidget_kind": None}]
            effects = []
        effects.append({"kind": "selection-highlight", "squidget": match.squidget_id,
                        "squidget_kind": match.kind})
        constraint = self._constraint(mods)
        used_solve = self.picked_attr is not None and match.kind == "implicit"
        self._action = []  # one undo unit for the apply plus the whole drag
        update, error = self._apply_match(match, stroke, mods)
        if error:
            self._action = None
            effects.append({"kind": "error", "message": error})
            return effects
        self._record_update(update)
        effects.extend(self._update_effects(update))
        if match.kind in ("continuous", "implicit") and not used_solve:
            self._drag = start_drag(match, self._anchor_pos, self.scene, constraint)
            effects.append({"kind": "drag-started", "squidget": match.squidget_id})
        else:
            self._close_action()
        return effects

    def _drag_step(self, pointer: np.ndarray) -> list[dict]:
        update = drag_update(self._drag, pointer, self.scene, self.registry)
        self._record_update(update)
        return self._update_effects(update)

    # -- create mode -------------------------------------------------------------------

    def classify_create_stroke(self, stroke_screen) -> str:
        """Gesture class for a create-mode stroke: crossout, connect or discrete."""
        world = self.scene.view.inverse().apply(dedupe_points(stroke_screen))
        for canvas in self.registry.canvases.values():
            if len(crossings(world, canvas.boundary())) >= 2:
                return "crossout"
        for d in self.registry.discrete.values():
            if len(crossings(world, d.curve)) >= 2:
                return "crossout"
        for cs in self.registry.continuous.values():
            if len(crossings(world, cs.path)) >= 2:
                return "crossout"
        singles = 0
        for d in self.registry.discrete.values():
            if len(crossings(world, d.curve)) == 1:
                singles += 1
        return "connect" if singles >= 2 else "discrete"

    def _create_stroke(self, stroke) -> list[dict]:
        world = self.scene.view.inverse().apply(dedupe_points(stroke))
        kind = self.classify_create_stroke(stroke)
        try:
            if kind == "crossout":
                deleted, payloads = self.registry.delete_by_crossout(world)
                if not deleted:
                    return []
                entry = [UndoAtom("registry-remove", payload=p) for p in payloads]
                self._push_entry(entry)
                return [{"kind": "squidget-deleted", "ids": deleted}]
            if kind == "connect":
                squidget = self.registry.create_continuous(world)
                self._push_entry([UndoAtom("registry-add", payload=squidget)])
                return [{"kind": "squidget-created", "id": squidget.id,
                         "squidget_kind": "continuous"}]
            squidget = self.registry.create_discrete(self.scene, world)
            self._push_entry([UndoAtom("registry-add", payload=squidget)])
            effects = [{"kind": "squidget-created", "id": squidget.id,
                        "squidget_kind": "discrete"}]
            for warning in self.scene.drain_warnings():
                effects.append({"kind": "warning", "message": warning})
            return effects
        except (GestureError, SceneError, GeometryError) as exc:
            return [{"kind": "error", "message": str(exc)}]

    # -- non-pointer events ---------------------------------------------------------------

    def _on_modifiers(self, ev: SessionEvent) -> list[dict]:
        bad = set(ev.modifiers) - set(MODIFIERS)
        if bad:
            raise SessionError(f"unknown modifiers: {sorted(bad)}")
        self._modifiers = set(ev.modifiers)
        if self._pointer_down:
            self._stroke_mods |= self._modifiers
        return []

    def _on_mode(self, ev: SessionEvent) -> list[dict]:
        mode = ev.data.get("mode")
        if mode not in MODES:
            raise SessionError(f"unknown mode: {mode}")
        self.mode = mode
        self.pending = None
        return [{"kind": "mode-changed", "mode": mode}]

    def _on_canvas_create(self, ev: SessionEvent) -> list[dict]:
        if self.mode != "create":
            return [{"kind": "error", "message": "canvas creation needs create mode"}]
        region = ev.data.get("region")
        if not isinstance(region, (list, tuple)) or len(region) != 4:
            raise SessionError("canvas-create needs a 4-number region")
        try:
            canvas = self.registry.create_canvas(self.scene, region, self.selection)
        except SceneError as exc:
            return [{"kind": "error", "message": str(exc)}]
        self._push_entry([UndoAtom("registry-add", payload=canvas)])
        return [{"kind": "canvas-created", "id": canvas.id}]

    def _on_selection(self, ev: SessionEvent) -> list[dict]:
        ids = ev.data.get("ids", [])
        for sid in ids:
            known = sid in self.scene.objects or any(
                p.owns(sid) for p in self.scene.providers.values())
            if not known:
                return [{"kind": "error", "message": f"unknown id: {sid}"}]
        self.selection = list(ids)
        return [{"kind": "selection-changed", "ids": list(ids)}]

    def _on_pick(self, ev: SessionEvent) -> list[dict]:
        raw = ev.data.get("path", "")
        if not raw:
            self.picked_attr = None
            return []
        try:
            self.picked_attr = parse_path(raw)
        except SceneError as exc:
            return [{"kind": "error", "message": str(exc)}]
        return [{"kind": "attribute-picked", "path": raw}]

    # -- undo machinery -----------------------------------------------------------------

    def _push_entry(self, entry: list[UndoAtom]) -> None:
        if not entry:
            return
        if self._action is not None:
            self._action.extend(entry)
            return
        self.undo_stack.append(entry)
        self.redo_stack.clear()

    def _push_update(self, update: AttributeUpdate | None) -> None:
        if update is not None:
            self._push_entry([UndoAtom("attr", change=c) for c in update.changes])

    def _record_update(self, update: AttributeUpdate | None) -> None:
        if update is not None and self._action is not None:
            self._action.extend(UndoAtom("attr", change=c) for c in update.changes)
        elif update is not None:
            self._push_update(update)

    def _close_action(self) -> None:
        if self._action is None:
            return
        entry, self._action = self._action, None
        # collapse repeated writes to a path into a single old -> new record
        merged: dict = {}
        order: list[UndoAtom] = []
        for atom in entry:
            if atom.op != "attr":
                order.append(atom)
                continue
            key = atom.change.path
            if key in merged:
                merged[key].change.new = atom.change.new
            else:
                copy = UndoAtom("attr", change=AttributeChange(
                    atom.change.path, atom.change.old, atom.change.new))
                merged[key] = copy
                order.append(copy)
        if order:
            self.undo_stack.append(order)
            self.redo_stack.clear()

    def undo(self) -> bool:
        if self._action is not None or not self.undo_stack:
            return False
        entry = self.undo_stack.pop()
        for atom in reversed(entry):
            if atom.op == "attr":
                self.scene.restore(atom.change.path, atom.change.old)
            elif atom.op == "registry-add":
                self.registry.remove_cascade(atom.payload.id)
            elif atom.op == "registry-remove":
                self.registry.insert(atom.payload)
        self.redo_stack.append(entry)
        return True

    def redo(self) -> bool:
        if not self.redo_stack:
            return False
        entry = self.redo_stack.pop()
        for atom in entry:
            if atom.op == "attr":
                self.scene.restore(atom.change.path, atom.change.new)
            elif atom.op == "registry-add":
                self.registry.insert(atom.payload)
            elif atom.op == "registry-remove":
                self.registry.remove_cascade(atom.payload.id)
        self.undo_stack.append(entry)
        return True

    def undo_all(self) -> int:
        count = 0
        while self.undo():
            count += 1
        return count

    # -- helpers ----------------------------------------------------------------------------

    @staticmethod
    def _update_effects(update: AttributeUpdate | None) -> list[dict]:
        if update is None:
            return []
        effects = [{"kind": "attribute-changed", "path": path_str(c.path),
                    "old": c.old, "new": c.new} for c in update.changes]
        effects.extend({"kind": "warning", "message": w} for w in update.warnings)
        return effects


def replay(events, scene: Scene, registry: SquidgetRegistry,
           config: EngineConfig | None = None) -> tuple[Session, list[dict]]:
    """Run a whole event log through a fresh session.

    Deterministic: identical (events, scene, registry, config) produce an
    identical final state and effect list.  A malformed event aborts with
    the offending index.
    """
    session = Session(scene, registry, config)
    effects: list[dict] = []
    for index, event in enumerate(events):
        try:
            effects.extend(session.handle(event))
        except SessionError as exc:
            raise SessionError(f"event {index}: {exc}") from None
    return session, effects
