"""Score a control-mode stroke against every candidate squidget.

All distances are computed in screen space: candidate curves stored in
world units are pushed through the scene's view transform first, matching
how the user actually saw them while drawing.  Matching is stateless given
a (stroke, registry, scene) triple, so candidates could be scored in any
order or in parallel with identical results; ties break toward the lowest
squidget id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import GeometryError
from .geometry import (
    RigidTransform2,
    bbox_diagonal,
    best_fit_rigid,
    conjugate_rigid,
    crossings,
    dist_min_reverse,
    ensure_stroke,
    pairwise_dist,
    project_to_polyline,
    resample,
)
from .registry import ContinuousSquidget, DiscreteSquidget, ImplicitSquidget, SquidgetRegistry
from .scene import Scene

MIN_PARTIAL_COVERAGE = 0.05  # skip implicit candidates touching less of the segment


@dataclass
class MatchResult:
    """The winning candidate plus whatever quantity the match solved for."""

    squidget_id: str
    kind: str  # discrete | continuous | implicit
    distance: float
    score: float
    w: float | None = None                      # continuous: interpolation weight
    transform: RigidTransform2 | None = None    # implicit: screen-space fit
    local: RigidTransform2 | None = None        # implicit: fit in the object frame
    dev: float | None = None                    # implicit: squared local move size
    partial: np.ndarray | None = None           # implicit: projected partial curve
    stroke: np.ndarray | None = None            # implicit: resampled screen stroke
    candidate: ImplicitSquidget | None = None


def match_discrete(stroke_screen, squidget: DiscreteSquidget, scene: Scene,
                   config: EngineConfig, centered: bool = False) -> float:
    """Distance from a stroke to a discrete squidget curve.

    The stroke is resampled to the curve's own control point count and
    compared pointwise in both orientations.  centered=True removes the
    translation component for shape-only selection.
    """
    s = resample(ensure_stroke(stroke_screen), len(squidget.curve))
    curve = scene.view.apply(squidget.curve)
    return dist_min_reverse(s, curve, centered)


def continuous_best_w(stroke_screen, cs: ContinuousSquidget, registry: SquidgetRegistry,
                      scene: Scene, centered: bool = False) -> tuple[float, float]:
    """Closed-form weight minimizing the stroke distance to the interpolated curve.

    For each member pair (P, Q) the distance to (1 - w) P + w Q is quadratic
    in w, so the per-segment optimum is sum((s - P) . (Q - P)) over
    sum(|Q - P|^2), clamped to [0, 1]; the best segment wins.  Both stroke
    orientations are tried.
    """
    curves = [scene.view.apply(registry.discrete[m].curve) for m in cs.members]
    s = resample(ensure_stroke(stroke_screen), len(curves[0]))
    if centered:
        # a blend of centered curves equals the centered blend, so centering
        # the members up front keeps the closed form valid
        s = s - s.mean(axis=0)
        curves = [c - c.mean(axis=0) for c in curves]
    best_w, best_d = 0.0, float("inf")
    for i in range(len(curves) - 1):
        p, q = curves[i], curves[i + 1]
        d = q - p
        denom = float(np.einsum("ij,ij->", d, d))
        for oriented in (s, s[::-1]):
            if denom < 1e-300:
                w_loc = 0.0
            else:
                w_loc = float(np.einsum("ij,ij->", oriented - p, d)) / denom
                w_loc = min(max(w_loc, 0.0), 1.0)
            blend = p + w_loc * d
            dist = pairwise_dist(oriented, blend)
            if dist < best_d:
                best_d = dist
                best_w = (i + w_loc) / (len(curves) - 1)
    return best_w, best_d


def match_continuous(stroke_screen, cs: ContinuousSquidget, registry: SquidgetRegistry,
                     scene: Scene, centered: bool = False) -> tuple[float, float]:
    """Weight and distance for a stroke against a continuous squidget.

    A stroke crossing the interpolation path pins w at the first crossing
    (ordered by stroke arc length); otherwise w comes from the closed-form
    best fit over the whole path.
    """
    stroke = ensure_stroke(stroke_screen)
    path = scene.view.apply(cs.path)
    m = len(cs.members)
    hits = crossings(stroke, path)
    if hits:
        first = hits[0]
        w = min(max((first.seg_b + first.t_b) / (m - 1), 0.0), 1.0)
        curve, _ = registry.interpolate(cs, w)
        s = resample(stroke, len(curve))
        return w, dist_min_reverse(s, scene.view.apply(curve), centered)
    return continuous_best_w(stroke, cs, registry, scene, centered)


def match_implicit(stroke_screen, imp: ImplicitSquidget, scene: Scene,
                   config: EngineConfig) -> MatchResult | None:
    """Partial-curve rigid fit of a stroke against one implicit segment.

    Each stroke point is projected to its closest point on the segment,
    which yields the partial curve and the point correspondences for the
    rigid fit.  Returns None for degenerate candidates: projections covering
    under five percent of the segment, or collapsing to a single point.
    """
    s = resample(ensure_stroke(stroke_screen), len(imp.segment))
    segment = scene.view.apply(imp.segment)
    feet = np.empty_like(s)
    params = np.empty(len(s))
    for i, point in enumerate(s):
        feet[i], params[i] = project_to_polyline(point, segment)
    if params.max() - params.min() < MIN_PARTIAL_COVERAGE:
        return None
    try:
        fit = best_fit_rigid(feet, s)
    except GeometryError:
        return None
    distance = pairwise_dist(s, fit.apply(feet))
    local = conjugate_rigid(fit, scene.local_to_screen(imp.object_id))
    dev = float(local.tx ** 2 + local.ty ** 2)
    return MatchResult(
        squidget_id=imp.id, kind="implicit", distance=distance, score=0.0,
        transform=fit, local=local, dev=dev, partial=feet, stroke=s, candidate=imp)


def selection_threshold(stroke_screen, config: EngineConfig) -> float:
    """Minimum score a candidate must reach before anything gets selected.

    Corresponds to a pointwise error of threshold_frac times the stroke's
    bounding box diagonal.
    """
    diag = bbox_diagonal(np.asarray(stroke_screen, dtype=float))
    allowed = config.resample_n * (config.threshold_frac * diag) ** 2
    return 1.0 / (allowed + config.epsilon)


def select(stroke_screen, registry: SquidgetRegistry, scene: Scene,
           config: EngineConfig | None = None, shape_only: bool = False,
           candidates: list[MatchResult] | None = None) -> MatchResult | None:
    """Pick the best-scoring squidget for a stroke, or nothing.

    Explicit squidgets score as 1 / (distance + eps).  Implicit squidgets
    blend shape distance with the size of the move the fit asks for:
    (1 - lambda) / (distance + eps) + lambda / (dev + eps), so of two
    equally shaped candidates the one requiring the smaller move wins.
    A stroke lying entirely inside a canvas only sees that canvas's
    squidgets.  Returns None when every score sits below the selection
    threshold.  When `candidates` is given, the scored list is appended to
    it (diagnostics for the CLI match table).
    """
    config = config or registry.config
    stroke = ensure_stroke(stroke_screen)
    eps = config.epsilon
    lam = config.lam
    scored: list[MatchResult] = []

    world = scene.view.inverse().apply(stroke)
    canvas = registry.canvas_containing(world)

    if canvas is not None:
        discrete = [d for d in registry.discrete.values() if d.canvas_id == canvas.id]
        on_canvas = {d.id for d in discrete}
        continuous = [c for c in registry.continuous.values()
                      if all(m in on_canvas for m in c.members)]
        implicit: list[ImplicitSquidget] = []
    else:
        discrete = list(registry.discrete.values())
        continuous = list(registry.continuous.values())
        implicit = registry.implicit_squidgets(scene)

    for d in discrete:
        dist = match_discrete(stroke, d, scene, config, centered=shape_only)
        scored.append(MatchResult(d.id, "discrete", dist, 1.0 / (dist + eps)))
    for cs in continuous:
        w, dist = match_continuous(stroke, cs, registry, scene, centered=shape_only)
        scored.append(MatchResult(cs.id, "continuous", dist, 1.0 / (dist + eps), w=w))
    for imp in implicit:
        result = match_implicit(stroke, imp, scene, config)
        if result is None:
            continue
        if shape_only:
            result.score = 1.0 / (result.distance + eps)
        else:
            result.score = (1.0 - lam) / (result.distance + eps) + lam / (result.dev + eps)
        scored.append(result)

    scored.sort(key=lambda r: (-r.score, r.squidget_id))
    if candidates is not None:
        candidates.extend(scored)
    if not scored or scored[0].score < selection_threshold(stroke, config):
        return None
    return scored[0]
