"""Turn match results into scene attribute updates.

Discrete matches restore a snapshot, continuous matches apply the blended
snapshot through the squidget's weight attribute, implicit matches compose
the fitted rigid transform onto the object's local transform, and scalar
shape parameters get a bounded golden-section search.  Every update returns
the change records needed to undo it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .errors import SceneError, SolveError
from .geometry import (
    RigidTransform2,
    dist_min_reverse,
    ensure_stroke,
    resample,
    similarity_scale,
    wrap_angle,
)
from .matching import MatchResult
from .registry import ImplicitSquidget, SquidgetRegistry
from .scene import AttrPath, AttributeChange, Scene, attr_range, path_str

CONSTRAINTS = ("full", "translate", "rotate", "scale")

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class AttributeUpdate:
    """A batch of applied attribute changes plus anything that was skipped."""

    changes: list[AttributeChange] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _apply_snapshot(snapshot: dict[AttrPath, float], scene: Scene) -> AttributeUpdate:
    update = AttributeUpdate()
    for path, value in sorted(snapshot.items()):
        try:
            update.changes.extend(scene.set(path, value))
        except SceneError as exc:
            update.warnings.append(f"skipped {path_str(path)}: {exc}")
    update.warnings.extend(scene.drain_warnings())
    return update


def apply_discrete(match: MatchResult, registry: SquidgetRegistry,
                   scene: Scene) -> AttributeUpdate:
    """Restore the matched squidget's bookmarked attribute values.

    Entries whose paths no longer resolve are skipped with a warning rather
    than aborting the rest of the snapshot.
    """
    squidget = registry.discrete.get(match.squidget_id)
    if squidget is None:
        raise SceneError(f"unknown squidget: {match.squidget_id}")
    return _apply_snapshot(squidget.snapshot, scene)


def apply_continuous(match: MatchResult, registry: SquidgetRegistry,
                     scene: Scene) -> AttributeUpdate:
    """Apply the interpolated snapshot at the solved weight.

    Routing the write through the squidget's own weight attribute both sets
    the blended values and records the weight itself, which is what lets a
    parent squidget drive this one later.
    """
    if match.w is None:
        raise SceneError("continuous match carries no weight")
    update = AttributeUpdate()
    update.changes.extend(scene.set(("squidget", match.squidget_id, "w"), match.w))
    update.warnings.extend(scene.drain_warnings())
    return update


def apply_implicit_transform(match: MatchResult, scene: Scene,
                             constraint: str = "full") -> AttributeUpdate:
    """Compose the fitted local transform onto the object's transform attributes.

    The constraint keeps only the requested component: translate and rotate
    drop the other part, scale switches to the similarity-fit variant and
    adjusts the uniform scale alone.  Values pushed outside an attribute's
    range are clamped with a warning.
    """
    if match.local is None or match.candidate is None:
        raise SceneError("implicit match carries no transform")
    if constraint not in CONSTRAINTS:
        raise SceneError(f"unknown constraint: {constraint}")
    obj = scene.object(match.candidate.object_id)
    update = AttributeUpdate()

    if constraint == "scale":
        if match.stroke is None:
            raise SceneError("implicit match carries no stroke for the scale fit")
        ratio = similarity_scale(match.partial, match.stroke)
        _set_clamped(scene, obj, "scale", obj.scale * ratio, update)
        return update

    local = match.local
    if constraint == "translate":
        local = RigidTransform2(0.0, local.tx, local.ty)
    elif constraint == "rotate":
        local = RigidTransform2(local.rotation, 0.0, 0.0)

    cos_r = math.cos(obj.rotation)
    sin_r = math.sin(obj.rotation)
    dx = obj.scale * (cos_r * local.tx - sin_r * local.ty)
    dy = obj.scale * (sin_r * local.tx + cos_r * local.ty)
    oid = obj.id
    for name, value in (("rotation", wrap_angle(obj.rotation + local.rotation)),
                        ("tx", obj.tx + dx), ("ty", obj.ty + dy)):
        update.changes.extend(scene.set((oid, "transform", name), value))
    return update


def _set_clamped(scene: Scene, obj, name: str, value: float,
                 update: AttributeUpdate) -> None:
    rng = attr_range(obj, name)
    if rng is not None and not rng.wrap:
        clamped = rng.clamp(value)
        if clamped != value:
            update.warnings.append(
                f"clamped {obj.id}/transform/{name} from {value:g} to {clamped:g}")
            value = clamped
    update.changes.extend(scene.set((obj.id, "transform", name), value))


def golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal scalar function on [lo, hi] to within tol."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def scalar_objective(stroke_screen, imp: ImplicitSquidget, path: AttrPath,
                     scene: Scene, registry: SquidgetRegistry):
    """g(v): centered distance between the stroke and the regenerated segment.

    The returned callable temporarily writes v, regenerates the same contour
    piece the implicit squidget came from, and restores the original value.
    """
    config = registry.config
    stroke = resample(ensure_stroke(stroke_screen), config.resample_n)
    original = scene.get(path)

    def g(value: float) -> float:
        scene.restore(path, value)
        try:
            segment = registry.regenerate_segment(scene, imp)
            if segment is None:
                return float("inf")
            return dist_min_reverse(stroke, scene.view.apply(segment), centered=True)
        finally:
            scene.restore(path, original)

    return g


def solve_scalar(stroke_screen, imp: ImplicitSquidget, path: AttrPath, scene: Scene,
                 registry: SquidgetRegistry) -> AttributeUpdate:
    """Local 1-D search for the attribute value whose contour best fits the stroke.

    Golden-section over a window of +-solve_window_frac of the declared range
    around the current value, intersected with the range itself.  The result
    never leaves the range and never fits worse than the current value.
    """
    if path not in {(imp.object_id, "shape", n) for n in scene.object(imp.object_id).shape}:
        raise SolveError(f"{path_str(path)} is not a shape parameter of {imp.object_id}")
    rng = attr_range(scene.object(imp.object_id), path[2])
    if rng is None:
        raise SolveError(f"unbounded attribute: {path_str(path)}")
    config = registry.config
    v0 = scene.get(path)
    half = config.solve_window_frac * rng.span
    lo = max(rng.lo, v0 - half)
    hi = min(rng.hi, v0 + half)
    g = scalar_objective(stroke_screen, imp, path, scene, registry)
    # converge far past the documented tolerance: the extra iterations are
    # nearly free and the returned value then sits at the numerical minimum
    # of the window instead of merely inside the tolerance bracket
    tol = config.solve_tol_frac * rng.span
    best_v, best_g = golden_section(g, lo, hi, tol * 1e-8)
    for candidate in (v0, lo, hi):
        gc = g(candidate)
        if gc < best_g:
            best_v, best_g = candidate, gc
    update = AttributeUpdate()
    update.changes.extend(scene.set(path, best_v))
    return update


# ---------------------------------------------------------------------------
# hold-and-drag refinement


@dataclass
class DragState:
    """Everything needed to keep refining an applied match while dragging."""

    match: MatchResult
    origin: np.ndarray                      # screen position where the hold began
    base_pose: tuple[float, float, float] | None = None  # (tx, ty, rotation) before apply
    constraint: str = "full"


def start_drag(match: MatchResult, origin, scene: Scene,
               constraint: str = "full") -> DragState:
    base = None
    if match.kind == "implicit" and match.candidate is not None:
        obj = scene.object(match.candidate.object_id)
        base = (obj.tx, obj.ty, obj.rotation)
    return DragState(match, np.asarray(origin, dtype=float), base, constraint)


def drag_update(drag: DragState, pointer, scene: Scene,
                registry: SquidgetRegistry) -> AttributeUpdate:
    """One drag refinement step; pointer is the current screen position.

    Continuous matches slide the weight to the pointer's projection onto the
    interpolation path.  Implicit matches re-apply the solved transform with
    its translation offset by the pointer delta since the hold began,
    expressed in the object's local frame; rotation stays at the solved
    value.  Under rotate or scale constraints the pointer delta is ignored.
    """
    pointer = np.asarray(pointer, dtype=float)
    match = drag.match
    if match.kind == "continuous":
        cs = registry.continuous.get(match.squidget_id)
        if cs is None:
            return AttributeUpdate()
        w = _path_parameter(pointer, scene.view.apply(cs.path))
        match.w = w
        return apply_continuous(match, registry, scene)
    if match.kind == "implicit":
        if drag.constraint in ("rotate", "scale") or drag.base_pose is None:
            return AttributeUpdate()
        delta = pointer - drag.origin
        x = scene.local_to_screen(match.candidate.object_id)
        # the pose reverts to its pre-apply base first so repeated drag calls
        # compose the offset once, not cumulatively
        obj = scene.object(match.candidate.object_id)
        obj.tx, obj.ty, obj.rotation = drag.base_pose
        local_delta = x.inverse().linear(delta)
        solved = match.local
        if drag.constraint == "translate":
            solved = RigidTransform2(0.0, solved.tx, solved.ty)
        offset = RigidTransform2(solved.rotation,
                                 solved.tx + local_delta[0],
                                 solved.ty + local_delta[1])
        shifted = MatchResult(match.squidget_id, "implicit", match.distance, match.score,
                              transform=match.transform, local=offset, dev=match.dev,
                              partial=match.partial, candidate=match.candidate)
        return apply_implicit_transform(shifted, scene, "full")
    return AttributeUpdate()


def _path_parameter(pointer: np.ndarray, path_screen: np.ndarray) -> float:
    """Segment-uniform parameter of the pointer's projection onto the path."""
    m = len(path_screen)
    best_d, best_w = float("inf"), 0.0
    for i in range(m - 1):
        a, b = path_screen[i], path_screen[i + 1]
        d = b - a
        len2 = float(d @ d)
        t = 0.0 if len2 < 1e-300 else min(max(float((pointer - a) @ d) / len2, 0.0), 1.0)
        foot = a + t * d
        dist = float(np.hypot(*(foot - pointer)))
        if dist < best_d:
            best_d = dist
            best_w = (i + t) / (m - 1)
    return best_w
