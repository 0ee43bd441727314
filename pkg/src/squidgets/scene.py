"""The manipulable 2D scene.

Objects carry a local similarity transform plus kind-specific scalar shape
parameters, all addressable through slash-separated attribute paths such as
``lamp/transform/tx`` or ``lamp/shape/cone_angle``.  Contours are generated
analytically per kind and are the curves the matching pipeline sees.

The scene is a single-owner mutable document; all mutation funnels through
``Scene.set`` (or ``Scene.restore`` for raw undo writes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneError
from .geometry import Similarity2, wrap_angle

AttrPath = tuple[str, ...]

TRANSFORM_ATTRS = ("tx", "ty", "rotation", "scale")
KINDS = ("polygon", "ellipse", "spotlight", "figure", "group")

CONTOUR_SAMPLES = 64  # ring resolution for ellipses, hot-spots and capsules


def path_str(path: AttrPath) -> str:
    return "/".join(path)


def parse_path(text: str) -> AttrPath:
    parts = tuple(text.split("/"))
    if not parts or any(not p for p in parts):
        raise SceneError(f"bad attribute path: {text!r}")
    return parts


@dataclass(frozen=True)
class AttrRange:
    """Declared bounds for an attribute; wrap=True means an angle that wraps."""

    lo: float
    hi: float
    wrap: bool = False

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def clamp(self, v: float) -> float:
        return min(max(v, self.lo), self.hi)


@dataclass
class AttributeChange:
    """One scalar write, recorded with enough to undo it."""

    path: AttrPath
    old: float
    new: float


@dataclass
class SceneObject:
    id: str
    kind: str
    tx: float = 0.0
    ty: float = 0.0
    rotation: float = 0.0
    scale: float = 1.0
    parent: str | None = None
    shape: dict[str, float] = field(default_factory=dict)
    geometry: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tx = float(self.tx)
        self.ty = float(self.ty)
        self.rotation = float(self.rotation)
        self.scale = float(self.scale)
        self.shape = {k: float(v) for k, v in self.shape.items()}


def polygon(oid: str, vertices, **tf) -> SceneObject:
    verts = [[float(x), float(y)] for x, y in vertices]
    if len(verts) < 3:
        raise SceneError("polygon needs at least three vertices")
    return SceneObject(oid, "polygon", geometry={"vertices": verts}, **tf)


def ellipse(oid: str, radius_x: float = 1.0, radius_y: float = 1.0, **tf) -> SceneObject:
    return SceneObject(oid, "ellipse",
                       shape={"radius_x": float(radius_x), "radius_y": float(radius_y)}, **tf)


def spotlight(oid: str, cone_angle: float = 0.4, direction: float = 0.0,
              intensity: float = 1.0, throw: float = 5.0, **tf) -> SceneObject:
    """A lamp analog: apex at the origin shining onto its own ground line.

    The beam points down the local -y axis, tilted by `direction`, and is
    `cone_angle` wide; it lights an elliptical hot-spot on the line sitting
    `throw` units below the apex.  The hot-spot geometry is a genuinely
    nonlinear function of the cone angle, which is what the scalar solver
    gets exercised on.
    """
    return SceneObject(oid, "spotlight",
                       shape={"cone_angle": float(cone_angle),
                              "direction": float(direction),
                              "intensity": float(intensity)},
                       geometry={"throw": float(throw)}, **tf)


def figure(oid: str, limbs, joints=None, **tf) -> SceneObject:
    """An articulated chain of capsule limbs; joint angles are attributes."""
    limb_list = [[float(l), float(r)] for l, r in limbs]
    if not limb_list:
        raise SceneError("figure needs at least one limb")
    angles = list(joints) if joints is not None else [0.0] * len(limb_list)
    if len(angles) != len(limb_list):
        raise SceneError("one joint angle per limb required")
    shape = {f"joint_{i}": float(a) for i, a in enumerate(angles)}
    return SceneObject(oid, "figure", shape=shape, geometry={"limbs": limb_list}, **tf)


def group(oid: str, **tf) -> SceneObject:
    return SceneObject(oid, "group", **tf)


_PI = math.pi
_TRANSFORM_RANGES = {
    "rotation": AttrRange(-_PI, _PI, wrap=True),
    "scale": AttrRange(1e-2, 1e2),
}
_SHAPE_RANGES = {
    "ellipse": {
        "radius_x": AttrRange(1e-2, 1e3),
        "radius_y": AttrRange(1e-2, 1e3),
    },
    "spotlight": {
        "cone_angle": AttrRange(1e-3, _PI / 2 - 1e-3),
        "direction": AttrRange(-0.9, 0.9),
        "intensity": AttrRange(0.0, 1.0),
    },
}


def attr_range(obj: SceneObject, name: str) -> AttrRange | None:
    """Declared range of one attribute, or None when it is unbounded."""
    if name in ("tx", "ty"):
        return None
    if name in _TRANSFORM_RANGES:
        return _TRANSFORM_RANGES[name]
    if obj.kind == "figure" and name.startswith("joint_"):
        return AttrRange(-_PI, _PI, wrap=True)
    return _SHAPE_RANGES.get(obj.kind, {}).get(name)


class Scene:
    """Objects, the view transform, and the attribute namespace."""

    def __init__(self):
        self.objects: dict[str, SceneObject] = {}
        self.view = Similarity2()
        self.providers: dict[str, object] = {}
        self._warnings: list[str] = []

    # -- structure ----------------------------------------------------------

    def add(self, obj: SceneObject) -> SceneObject:
        if obj.id in self.objects:
            raise SceneError(f"duplicate object id: {obj.id}")
        if "/" in obj.id or obj.id in self.providers:
            raise SceneError(f"bad object id: {obj.id}")
        if obj.kind not in KINDS:
            raise SceneError(f"unknown object kind: {obj.kind}")
        if obj.parent is not None:
            if obj.parent not in self.objects:
                raise SceneError(f"unknown parent: {obj.parent}")
        self.objects[obj.id] = obj
        return obj

    def object(self, oid: str) -> SceneObject:
        try:
            return self.objects[oid]
        except KeyError:
            raise SceneError(f"unknown object: {oid}") from None

    def children(self, oid: str) -> list[str]:
        return [o.id for o in self.objects.values() if o.parent == oid]

    def warn(self, message: str) -> None:
        self._warnings.append(message)

    def drain_warnings(self) -> list[str]:
        out = self._warnings
        self._warnings = []
        return out

    # -- attributes ----------------------------------------------------------

    def _resolve(self, path: AttrPath):
        if not path:
            raise SceneError("empty attribute path")
        if path[0] in self.providers:
            return self.providers[path[0]], None, None
        if path[0] not in self.objects:
            raise SceneError(f"unknown attribute: {path_str(path)}")
        obj = self.objects[path[0]]
        if len(path) != 3 or path[1] not in ("transform", "shape"):
            raise SceneError(f"unknown attribute: {path_str(path)}")
        if path[1] == "transform":
            if path[2] not in TRANSFORM_ATTRS:
                raise SceneError(f"unknown attribute: {path_str(path)}")
        elif path[2] not in obj.shape:
            raise SceneError(f"unknown attribute: {path_str(path)}")
        return None, obj, path[2]

    def get(self, path: AttrPath) -> float:
        provider, obj, name = self._resolve(path)
        if provider is not None:
            return provider.get_attr(path)
        if path[1] == "transform":
            return float(getattr(obj, name))
        return float(obj.shape[name])

    def set(self, path: AttrPath, value: float) -> list[AttributeChange]:
        """Validated write; returns the change records the write produced.

        Writes into a provider namespace (squidget weights) may cascade into
        further scene writes, all of which are included in the result.
        """
        provider, obj, name = self._resolve(path)
        if provider is not None:
            return provider.set_attr(self, path, value)
        value = float(value)
        if not math.isfinite(value):
            raise SceneError(f"range violation: {path_str(path)} must be finite")
        rng = attr_range(obj, name)
        if rng is not None:
            if rng.wrap:
                value = wrap_angle(value)
            elif not (rng.lo <= value <= rng.hi):
                raise SceneError(
                    f"range violation: {path_str(path)} = {value:g} outside "
                    f"[{rng.lo:g}, {rng.hi:g}]")
        old = self.get(path)
        if path[1] == "transform":
            setattr(obj, name, value)
        else:
            obj.shape[name] = value
        return [AttributeChange(path, old, value)]

    def restore(self, path: AttrPath, value: float) -> None:
        """Raw write used by undo/redo and solver probes; no cascading."""
        provider, obj, name = self._resolve(path)
        if provider is not None:
            provider.restore_attr(path, value)
        elif path[1] == "transform":
            setattr(obj, name, float(value))
        else:
            obj.shape[name] = float(value)

    def object_paths(self, oid: str) -> list[AttrPath]:
        """The object's own attribute paths (transform then sorted shape)."""
        obj = self.object(oid)
        paths = [(oid, "transform", n) for n in TRANSFORM_ATTRS]
        paths.extend((oid, "shape", n) for n in sorted(obj.shape))
        return paths

    def subtree_paths(self, oid: str) -> list[AttrPath]:
        paths = self.object_paths(oid)
        for child in self.children(oid):
            paths.extend(self.subtree_paths(child))
        return paths

    def collect(self, selection) -> dict[AttrPath, float]:
        """Snapshot every attribute of the selected ids and their descendants.

        Ids may name scene objects or anything a provider owns (continuous
        squidget weights), which is how squidgets become drivable by other
        squidgets.
        """
        snapshot: dict[AttrPath, float] = {}
        for sid in selection:
            if sid in self.objects:
                paths = self.subtree_paths(sid)
            else:
                provider = next((p for p in self.providers.values() if p.owns(sid)), None)
                if provider is None:
                    raise SceneError(f"unknown id: {sid}")
                paths = provider.paths_for(sid)
            for p in paths:
                snapshot[p] = self.get(p)
        return snapshot

    # -- transforms ----------------------------------------------------------

    def local_transform(self, obj: SceneObject) -> Similarity2:
        return Similarity2(obj.rotation, obj.scale, obj.tx, obj.ty)

    def world_transform(self, oid: str) -> Similarity2:
        obj = self.object(oid)
        chain = []
        seen = set()
        while obj is not None:
            if obj.id in seen:
                raise SceneError(f"parent cycle at {obj.id}")
            seen.add(obj.id)
            chain.append(obj)
            obj = self.objects.get(obj.parent) if obj.parent else None
        xform = Similarity2()
        for node in reversed(chain):
            xform = xform.compose(self.local_transform(node))
        return xform

    def local_to_screen(self, oid: str) -> Similarity2:
        return self.view.compose(self.world_transform(oid))

    # -- contours -------------------------------------------------------------

    def contour(self, oid: str) -> list[np.ndarray]:
        """Analytic world-space outlines of the object at its current state."""
        obj = self.object(oid)
        xform = self.world_transform(oid)
        return [xform.apply(c) for c in _local_contours(obj)]


def _ellipse_ring(cx: float, cy: float, rx: float, ry: float,
                  n: int = CONTOUR_SAMPLES) -> np.ndarray:
    t = np.linspace(0.0, 2.0 * math.pi, n)
    ring = np.column_stack((cx + rx * np.cos(t), cy + ry * np.sin(t)))
    ring[-1] = ring[0]
    return ring


def _capsule_ring(p0, p1, radius: float, n: int = CONTOUR_SAMPLES) -> np.ndarray:
    from .geometry import resample

    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    axis = p1 - p0
    length = float(np.hypot(*axis))
    if length < 1e-12:
        return _ellipse_ring(p0[0], p0[1], radius, radius, n)
    u = axis / length
    nrm = np.array([-u[1], u[0]])
    ang = math.atan2(u[1], u[0])
    arc1 = ang - math.pi / 2 + np.linspace(0.0, math.pi, 24)
    arc0 = ang + math.pi / 2 + np.linspace(0.0, math.pi, 24)
    dense = np.vstack((
        p0 + radius * nrm,
        p1 + radius * nrm,
        p1 + radius * np.column_stack((np.cos(arc1), np.sin(arc1))),
        p1 - radius * nrm,
        p0 - radius * nrm,
        p0 + radius * np.column_stack((np.cos(arc0), np.sin(arc0))),
        p0 + radius * nrm,
    ))
    ring = resample(dense, n)
    ring[-1] = ring[0]
    return ring


def _spotlight_hit(theta: float, throw: float) -> np.ndarray:
    s = math.sin(theta)
    t = -throw / s if s < -1e-9 else 1e6  # nearly horizontal rays land far away
    return np.array([t * math.cos(theta), t * s])


def _local_contours(obj: SceneObject) -> list[np.ndarray]:
    if obj.kind == "polygon":
        verts = np.asarray(obj.geometry["vertices"], dtype=float)
        return [np.vstack((verts, verts[:1]))]
    if obj.kind == "ellipse":
        return [_ellipse_ring(0.0, 0.0, obj.shape["radius_x"], obj.shape["radius_y"])]
    if obj.kind == "spotlight":
        throw = float(obj.geometry["throw"])
        beam = -math.pi / 2 + obj.shape["direction"]
        cone = obj.shape["cone_angle"]
        hit_a = _spotlight_hit(beam - cone, throw)
        hit_b = _spotlight_hit(beam + cone, throw)
        cx = 0.5 * (hit_a[0] + hit_b[0])
        semi_major = max(0.5 * abs(hit_b[0] - hit_a[0]), 1e-9)
        semi_minor = max(throw * math.tan(cone), 1e-9)
        ring = _ellipse_ring(cx, -throw, semi_major, semi_minor)
        apex = np.zeros(2)
        return [ring, np.vstack((apex, hit_a)), np.vstack((apex, hit_b))]
    if obj.kind == "figure":
        rings = []
        pos = np.zeros(2)
        angle = 0.0
        for i, (length, radius) in enumerate(obj.geometry["limbs"]):
            angle += obj.shape[f"joint_{i}"]
            tip = pos + length * np.array([math.cos(angle), math.sin(angle)])
            rings.append(_capsule_ring(pos, tip, radius))
            pos = tip
        return rings
    return []  # groups have no outline of their own
