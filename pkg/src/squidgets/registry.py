"""Creation, storage and interpolation of squidgets and canvases.

Explicit squidgets live here permanently; implicit ones are derived from
the scene's contours on demand so they always reflect the current pose.
The registry also plugs into the scene's attribute namespace under the
``squidget`` prefix, exposing each continuous squidget's interpolation
weight as a drivable scalar.  Setting that weight applies the squidget's
interpolated snapshot to the scene, which is what lets squidgets drive
other squidgets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import EngineConfig
from .errors import GestureError, SceneError
from .geometry import crossings, ensure_stroke, resample, smooth, split_at_corners
from .scene import AttrPath, AttributeChange, Scene, path_str


@dataclass
class Canvas:
    """A rectangular region that groups squidgets and fixes their attribute set."""

    id: str
    region: tuple[float, float, float, float]  # (x0, y0, x1, y1), world units
    attr_paths: tuple[AttrPath, ...]
    z: int = 0

    def boundary(self) -> np.ndarray:
        x0, y0, x1, y1 = self.region
        return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])

    def contains(self, points) -> bool:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        x0, y0, x1, y1 = self.region
        return bool(np.all((pts[:, 0] >= x0) & (pts[:, 0] <= x1)
                           & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)))


@dataclass
class DiscreteSquidget:
    """An authored curve bookmarking one attribute configuration."""

    id: str
    curve: np.ndarray  # fixed control point count, world space
    canvas_id: str
    snapshot: dict[AttrPath, float]


@dataclass
class ContinuousSquidget:
    """An ordered family of discrete squidgets with an interpolation path."""

    id: str
    members: list[str]
    path: np.ndarray  # one point per member, through the member curve midpoints
    weight: float = 0.0


@dataclass
class ImplicitSquidget:
    """A corner-delimited piece of an object contour, bound to that object."""

    id: str
    object_id: str
    segment: np.ndarray  # world space, resampled to the control point count
    contour_index: int
    segment_index: int
    whole: bool  # the piece covers its entire contour (no corners found)
    attr_paths: tuple[AttrPath, ...]


def _snapshot_refs(snapshot: dict[AttrPath, float]) -> set[str]:
    return {p[1] for p in snapshot if p[0] == "squidget" and len(p) == 3}


class SquidgetRegistry:
    """Single owner of all canvases and explicit squidgets."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.canvases: dict[str, Canvas] = {}
        self.discrete: dict[str, DiscreteSquidget] = {}
        self.continuous: dict[str, ContinuousSquidget] = {}
        self._counters = {"c": 0, "d": 0, "s": 0}
        self._driving: list[str] = []

    def attach(self, scene: Scene) -> None:
        scene.providers["squidget"] = self

    def _new_id(self, prefix: str) -> str:
        self._counters[prefix] += 1
        return f"{prefix}{self._counters[prefix]}"

    def note_loaded_id(self, sid: str) -> None:
        """Keep id counters ahead of ids brought in by a document load."""
        if len(sid) > 1 and sid[0] in self._counters and sid[1:].isdigit():
            self._counters[sid[0]] = max(self._counters[sid[0]], int(sid[1:]))

    # -- provider interface (scene attribute namespace "squidget/<id>/w") ----

    def owns(self, sid: str) -> bool:
        return sid in self.continuous

    def paths_for(self, sid: str) -> list[AttrPath]:
        if sid not in self.continuous:
            raise SceneError(f"unknown id: {sid}")
        return [("squidget", sid, "w")]

    def _weight_target(self, path: AttrPath) -> ContinuousSquidget:
        if len(path) != 3 or path[2] != "w" or path[1] not in self.continuous:
            raise SceneError(f"unknown attribute: {path_str(path)}")
        return self.continuous[path[1]]

    def get_attr(self, path: AttrPath) -> float:
        return self._weight_target(path).weight

    def set_attr(self, scene: Scene, path: AttrPath, value: float) -> list[AttributeChange]:
        cs = self._weight_target(path)
        w = min(max(float(value), 0.0), 1.0)
        if cs.id in self._driving:
            scene.warn(f"skipped cyclic drive of squidget {cs.id}")
            return []
        self._driving.append(cs.id)
        try:
            _, snapshot = self.interpolate(cs, w)
            changes: list[AttributeChange] = []
            for p, v in sorted(snapshot.items()):
                try:
                    changes.extend(scene.set(p, v))
                except SceneError as exc:
                    scene.warn(f"skipped {path_str(p)}: {exc}")
            changes.append(AttributeChange(path, cs.weight, w))
            cs.weight = w
            return changes
        finally:
            self._driving.pop()

    def restore_attr(self, path: AttrPath, value: float) -> None:
        self._weight_target(path).weight = float(value)

    # -- canvases -------------------------------------------------------------

    def create_canvas(self, scene: Scene, region, selection, z: int | None = None) -> Canvas:
        x0, y0, x1, y1 = (float(v) for v in region)
        x0, x1 = min(x0, x1), max(x0, x1)
        y0, y1 = min(y0, y1), max(y0, y1)
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            raise SceneError("canvas region must have positive area")
        snapshot = scene.collect(selection)
        if z is None:
            z = 1 + max((c.z for c in self.canvases.values()), default=0)
        canvas = Canvas(self._new_id("c"), (x0, y0, x1, y1),
                        tuple(sorted(snapshot)), int(z))
        self.canvases[canvas.id] = canvas
        return canvas

    def canvas_containing(self, world_points) -> Canvas | None:
        """Topmost canvas whose region contains every point, if any."""
        hits = [c for c in self.canvases.values() if c.contains(world_points)]
        if not hits:
            return None
        return max(hits, key=lambda c: (c.z, c.id))

    # -- explicit squidgets ----------------------------------------------------

    def create_discrete(self, scene: Scene, stroke_world) -> DiscreteSquidget:
        stroke = ensure_stroke(stroke_world)
        canvas = self.canvas_containing(stroke)
        if canvas is None:
            raise GestureError("stroke is not inside a canvas")
        curve = resample(smooth(stroke, self.config.smooth_iterations),
                         self.config.resample_n)
        snapshot: dict[AttrPath, float] = {}
        for p in canvas.attr_paths:
            try:
                snapshot[p] = scene.get(p)
            except SceneError as exc:
                scene.warn(f"skipped stale canvas attribute {path_str(p)}: {exc}")
        squidget = DiscreteSquidget(self._new_id("d"), curve, canvas.id, snapshot)
        self.discrete[squidget.id] = squidget
        return squidget

    def connect_members(self, stroke_world) -> list[str]:
        """Member ids for a connect gesture, ordered along the stroke.

        Requires at least two discrete curves crossed exactly once each and
        none crossed more than once.
        """
        stroke = ensure_stroke(stroke_world)
        hits: list[tuple[float, str]] = []
        for d in self.discrete.values():
            cr = crossings(stroke, d.curve)
            if len(cr) >= 2:
                raise GestureError("not a connect gesture")
            if len(cr) == 1:
                hits.append((cr[0].param_a, d.id))
        if len(hits) < 2:
            raise GestureError("not a connect gesture")
        hits.sort()
        return [did for _, did in hits]

    def create_continuous(self, stroke_world) -> ContinuousSquidget:
        members = self.connect_members(stroke_world)
        new_id = f"s{self._counters['s'] + 1}"
        refs = set()
        for mid in members:
            refs |= _snapshot_refs(self.discrete[mid].snapshot)
        if self._would_cycle(new_id, refs):
            raise GestureError("nested squidget cycle")
        path = np.array([self.discrete[m].curve.mean(axis=0) for m in members])
        squidget = ContinuousSquidget(self._new_id("s"), members, path, 0.0)
        assert squidget.id == new_id
        self.continuous[squidget.id] = squidget
        return squidget

    def _drive_edges(self) -> dict[str, set[str]]:
        edges: dict[str, set[str]] = {}
        for cs in self.continuous.values():
            refs = set()
            for mid in cs.members:
                if mid in self.discrete:
                    refs |= _snapshot_refs(self.discrete[mid].snapshot)
            edges[cs.id] = refs
        return edges

    @staticmethod
    def _has_cycle(edges: dict[str, set[str]]) -> bool:
        state: dict[str, int] = {}

        def visit(node: str) -> bool:
            if state.get(node) == 1:
                return True
            if state.get(node) == 2 or node not in edges:
                return False
            state[node] = 1
            if any(visit(nxt) for nxt in edges[node]):
                return True
            state[node] = 2
            return False

        return any(visit(node) for node in list(edges))

    def _would_cycle(self, new_id: str, new_refs: set[str]) -> bool:
        edges = self._drive_edges()
        edges[new_id] = set(new_refs)
        return self._has_cycle(edges)

    def drive_cycle_exists(self) -> bool:
        """True when the stored snapshots already form a driving cycle."""
        return self._has_cycle(self._drive_edges())

    # -- interpolation ----------------------------------------------------------

    def interpolate(self, cs: ContinuousSquidget | str,
                    w: float) -> tuple[np.ndarray, dict[AttrPath, float]]:
        """Curve and attribute snapshot at interpolation weight w in [0, 1].

        The path is split into m - 1 uniform segments for m members; w = 0
        and w = 1 reproduce the first and last member exactly, and interior
        member positions i / (m - 1) reproduce member i exactly.  Attributes
        blend over the union of the two neighbouring snapshots; a value only
        one endpoint knows about is held constant rather than jumped.
        """
        if isinstance(cs, str):
            if cs not in self.continuous:
                raise SceneError(f"unknown squidget: {cs}")
            cs = self.continuous[cs]
        w = min(max(float(w), 0.0), 1.0)
        m = len(cs.members)
        t = w * (m - 1)
        i = min(int(t), m - 2)
        u = t - i
        if u < 1e-12:
            u = 0.0
        elif u > 1 - 1e-12:
            i, u = i + 1, 0.0
            if i > m - 1:
                i = m - 1
        lo = self.discrete[cs.members[min(i, m - 1)]]
        if u == 0.0:
            return lo.curve.copy(), dict(lo.snapshot)
        hi = self.discrete[cs.members[i + 1]]
        curve = (1.0 - u) * lo.curve + u * hi.curve
        snapshot: dict[AttrPath, float] = {}
        for p in lo.snapshot.keys() | hi.snapshot.keys():
            if p in lo.snapshot and p in hi.snapshot:
                snapshot[p] = (1.0 - u) * lo.snapshot[p] + u * hi.snapshot[p]
            else:
                snapshot[p] = lo.snapshot.get(p, hi.snapshot.get(p))
        return curve, snapshot

    # -- deletion ----------------------------------------------------------------

    def remove_cascade(self, sid: str) -> list[object]:
        """Remove an id and everything that depends on it; returns the payloads."""
        removed: list[object] = []
        if sid in self.canvases:
            for d in [d for d in self.discrete.values() if d.canvas_id == sid]:
                removed.extend(self.remove_cascade(d.id))
            removed.append(self.canvases.pop(sid))
        elif sid in self.discrete:
            for cs in [c for c in self.continuous.values() if sid in c.members]:
                removed.extend(self.remove_cascade(cs.id))
            removed.append(self.discrete.pop(sid))
        elif sid in self.continuous:
            removed.append(self.continuous.pop(sid))
        return removed

    def insert(self, payload: object) -> None:
        """Put a previously removed canvas or squidget back, same id."""
        if isinstance(payload, Canvas):
            self.canvases[payload.id] = payload
        elif isinstance(payload, DiscreteSquidget):
            self.discrete[payload.id] = payload
        elif isinstance(payload, ContinuousSquidget):
            self.continuous[payload.id] = payload
        else:
            raise SceneError(f"cannot insert {type(payload).__name__}")

    def delete_by_crossout(self, stroke_world) -> tuple[list[str], list[object]]:
        """Delete everything the stroke crosses at least twice.

        Canvas boundaries, discrete curves and continuous paths all count.
        Cascades follow: a canvas takes its squidgets with it, a member takes
        its continuous squidget.  Returns (sorted deleted ids, payloads in
        removal order).
        """
        stroke = ensure_stroke(stroke_world)
        targets: list[str] = []
        for canvas in self.canvases.values():
            if len(crossings(stroke, canvas.boundary())) >= 2:
                targets.append(canvas.id)
        for d in self.discrete.values():
            if len(crossings(stroke, d.curve)) >= 2:
                targets.append(d.id)
        for cs in self.continuous.values():
            if len(cs.path) >= 2 and len(crossings(stroke, cs.path)) >= 2:
                targets.append(cs.id)
        payloads: list[object] = []
        for sid in targets:
            payloads.extend(self.remove_cascade(sid))
        return sorted({p.id for p in payloads}), payloads

    # -- implicit squidgets ---------------------------------------------------------

    def implicit_squidgets(self, scene: Scene) -> list[ImplicitSquidget]:
        """Corner-split contour segments for every object, at the current pose."""
        cfg = self.config
        out: list[ImplicitSquidget] = []
        for oid in scene.objects:
            paths = tuple(scene.object_paths(oid))
            for ci, contour in enumerate(scene.contour(oid)):
                pieces = split_at_corners(contour, cfg.corner_samples,
                                          cfg.corner_window, cfg.corner_ratio)
                for si, piece in enumerate(pieces):
                    out.append(ImplicitSquidget(
                        id=f"{oid}:{ci}:{si}",
                        object_id=oid,
                        segment=resample(piece, cfg.resample_n),
                        contour_index=ci,
                        segment_index=si,
                        whole=len(pieces) == 1,
                        attr_paths=paths,
                    ))
        return out

    def regenerate_segment(self, scene: Scene, imp: ImplicitSquidget) -> np.ndarray | None:
        """The same contour piece as imp, regenerated at the current scene state."""
        cfg = self.config
        contours = scene.contour(imp.object_id)
        if imp.contour_index >= len(contours):
            return None
        contour = contours[imp.contour_index]
        if imp.whole:
            # same two-step resampling the full pipeline performs, minus the
            # corner scan this piece is known not to need
            dense = resample(contour, cfg.corner_samples)
            return resample(dense, cfg.resample_n)
        pieces = split_at_corners(contour, cfg.corner_samples,
                                  cfg.corner_window, cfg.corner_ratio)
        if imp.segment_index >= len(pieces):
            return None
        return resample(pieces[imp.segment_index], cfg.resample_n)
