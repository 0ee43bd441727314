"""Invariant checks for loaded documents, plus seeded randomized probes."""

from __future__ import annotations

import math

import numpy as np

from .config import EngineConfig
from .geometry import arc_length, best_fit_rigid, resample, wrap_angle
from .registry import SquidgetRegistry
from .scene import Scene, attr_range, path_str


def validate_document(scene: Scene, registry: SquidgetRegistry,
                      config: EngineConfig) -> tuple[list[str], list[str]]:
    """Check every declared document invariant.

    Returns (ok lines, violation lines); an empty violation list means the
    document is sound.
    """
    ok: list[str] = []
    bad: list[str] = []

    def check(name: str, condition: bool, detail: str = "") -> None:
        if condition:
            ok.append(f"ok: {name}")
        else:
            bad.append(f"violation: {name}" + (f" ({detail})" if detail else ""))

    check("view scale positive", scene.view.scale > 0)

    for obj in scene.objects.values():
        for name in ("tx", "ty", "rotation", "scale"):
            value = getattr(obj, name)
            check(f"{obj.id}/transform/{name} finite", math.isfinite(value), f"{value!r}")
        for name, value in obj.shape.items():
            rng = attr_range(obj, name)
            if rng is None or rng.wrap:
                check(f"{obj.id}/shape/{name} finite", math.isfinite(value))
            else:
                check(f"{obj.id}/shape/{name} in range", rng.lo <= value <= rng.hi,
                      f"{value:g} outside [{rng.lo:g}, {rng.hi:g}]")
        rng = attr_range(obj, "scale")
        check(f"{obj.id} scale positive", obj.scale > 0, f"{obj.scale:g}")
        if obj.parent is not None:
            seen = {obj.id}
            node = obj
            acyclic = True
            while node.parent is not None:
                if node.parent in seen or node.parent not in scene.objects:
                    acyclic = False
                    break
                seen.add(node.parent)
                node = scene.objects[node.parent]
            check(f"{obj.id} parent chain acyclic", acyclic)

    for canvas in registry.canvases.values():
        x0, y0, x1, y1 = canvas.region
        check(f"canvas {canvas.id} region positive", x1 > x0 and y1 > y0)

    for squidget in registry.discrete.values():
        check(f"squidget {squidget.id} curve has {config.resample_n} points",
              len(squidget.curve) == config.resample_n, f"{len(squidget.curve)}")
        canvas = registry.canvases.get(squidget.canvas_id)
        if canvas is not None:
            subset = set(squidget.snapshot) <= set(canvas.attr_paths)
            check(f"squidget {squidget.id} snapshot paths within canvas attrs", subset)
        for path in squidget.snapshot:
            try:
                scene.get(path)
            except Exception:
                ok.append(f"note: squidget {squidget.id} snapshot entry "
                          f"{path_str(path)} is stale")

    for squidget in registry.continuous.values():
        check(f"squidget {squidget.id} has at least two members",
              len(squidget.members) >= 2)
        check(f"squidget {squidget.id} path matches member count",
              len(squidget.path) == len(squidget.members))
        check(f"squidget {squidget.id} weight within [0, 1]",
              0.0 <= squidget.weight <= 1.0, f"{squidget.weight:g}")
        missing = [m for m in squidget.members if m not in registry.discrete]
        check(f"squidget {squidget.id} members resolve", not missing, f"{missing}")

    check("squidget drive graph acyclic", not registry.drive_cycle_exists())
    return ok, bad


def random_probes(seed: int, config: EngineConfig) -> tuple[list[str], list[str]]:
    """Seeded self-checks of the geometric kernels, for validate --seed."""
    rng = np.random.default_rng(seed)
    ok: list[str] = []
    bad: list[str] = []

    for trial in range(20):
        pts = np.cumsum(rng.normal(size=(8, 2)), axis=0)
        sampled = resample(pts, config.resample_n)
        total = arc_length(pts)
        gaps = np.diff([_arc_position(p, pts) for p in sampled]) * total
        target = total / (config.resample_n - 1)
        if np.abs(gaps - target).max() < 1e-6 * total:
            ok.append(f"ok: resample uniformity trial {trial}")
        else:
            bad.append(f"violation: resample uniformity trial {trial}")

    for trial in range(20):
        source = rng.normal(size=(12, 2))
        angle = rng.uniform(-math.pi, math.pi)
        shift = rng.uniform(-5, 5, size=2)
        c, s = math.cos(angle), math.sin(angle)
        target = source @ np.array([[c, -s], [s, c]]).T + shift
        fit = best_fit_rigid(source, target)
        angle_err = abs(wrap_angle(fit.rotation - angle))
        shift_err = float(np.hypot(*(fit.translation - shift)))
        if angle_err < 1e-9 and shift_err < 1e-9:
            ok.append(f"ok: rigid fit recovery trial {trial}")
        else:
            bad.append(f"violation: rigid fit recovery trial {trial}")
    return ok, bad


def _arc_position(point, polyline) -> float:
    from .geometry import project_to_polyline

    _, param = project_to_polyline(point, polyline)
    return param
