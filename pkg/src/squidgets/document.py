"""Scene document and event log serialization.

Both formats are line-diffable JSON with a canonical field order, so the
same state always serializes to the same bytes: floats use Python's
shortest round-trip repr and collections are sorted by id.  Unknown fields
are rejected with the JSON path of the offender; parse failures report line
and column.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .config import EngineConfig
from .errors import DocumentError
from .geometry import Similarity2
from .registry import Canvas, ContinuousSquidget, DiscreteSquidget, SquidgetRegistry
from .scene import Scene, SceneObject, parse_path, path_str
from .session import SessionEvent

SCENE_FORMAT = "squidget-scene"
LOG_FORMAT = "squidget-log"
VERSION = 1

_OBJECT_KEYS = {"id", "kind", "tx", "ty", "rotation", "scale", "parent", "shape", "geometry"}
_CANVAS_KEYS = {"id", "region", "z", "attrs"}
_DISCRETE_KEYS = {"id", "canvas", "curve", "snapshot"}
_CONTINUOUS_KEYS = {"id", "members", "path", "weight"}
_DOC_KEYS = {"format", "version", "config", "view", "objects", "canvases",
             "discrete", "continuous"}


def _require_keys(record: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(record) - allowed)
    if unknown:
        raise DocumentError(f"unknown field {where}.{unknown[0]}")


def _points(curve) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in np.asarray(curve, dtype=float)]


def scene_to_doc(scene: Scene, registry: SquidgetRegistry,
                 config: EngineConfig) -> dict:
    objects = []
    for obj in scene.objects.values():
        record = {
            "id": obj.id, "kind": obj.kind,
            "tx": obj.tx, "ty": obj.ty, "rotation": obj.rotation, "scale": obj.scale,
            "parent": obj.parent,
            "shape": {k: obj.shape[k] for k in sorted(obj.shape)},
            "geometry": {k: obj.geometry[k] for k in sorted(obj.geometry)},
        }
        objects.append(record)
    canvases = [{
        "id": c.id,
        "region": [c.region[0], c.region[1], c.region[2], c.region[3]],
        "z": c.z,
        "attrs": [path_str(p) for p in c.attr_paths],
    } for c in sorted(registry.canvases.values(), key=lambda c: c.id)]
    discrete = [{
        "id": d.id,
        "canvas": d.canvas_id,
        "curve": _points(d.curve),
        "snapshot": {path_str(p): v for p, v in sorted(d.snapshot.items())},
    } for d in sorted(registry.discrete.values(), key=lambda d: d.id)]
    continuous = [{
        "id": s.id,
        "members": list(s.members),
        "path": _points(s.path),
        "weight": s.weight,
    } for s in sorted(registry.continuous.values(), key=lambda s: s.id)]
    return {
        "format": SCENE_FORMAT,
        "version": VERSION,
        "config": config.to_dict(),
        "view": {"rotation": scene.view.rotation, "scale": scene.view.scale,
                 "tx": scene.view.tx, "ty": scene.view.ty},
        "objects": objects,
        "canvases": canvases,
        "discrete": discrete,
        "continuous": continuous,
    }


def dumps_scene(scene: Scene, registry: SquidgetRegistry, config: EngineConfig) -> str:
    return json.dumps(scene_to_doc(scene, registry, config), indent=2) + "\n"


def doc_sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _parse_json(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def loads_scene(text: str) -> tuple[Scene, SquidgetRegistry, EngineConfig]:
    """Parse a scene document; the inverse of dumps_scene.

    Structural problems (unknown fields, bad references, wrong version) are
    rejected here; value-level invariants are the validate command's job, so
    a document carrying an out-of-range scalar still loads and can be
    reported on.
    """
    doc = _parse_json(text)
    if not isinstance(doc, dict):
        raise DocumentError("document root must be an object")
    _require_keys(doc, _DOC_KEYS, "$")
    if doc.get("format") != SCENE_FORMAT:
        raise DocumentError(f"not a scene document: format = {doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise DocumentError(f"unsupported document version: {doc.get('version')!r}")

    config = EngineConfig.from_dict(doc.get("config", {}))
    registry = SquidgetRegistry(config)
    scene = Scene()
    registry.attach(scene)

    view = doc.get("view", {})
    _require_keys(view, {"rotation", "scale", "tx", "ty"}, "$.view")
    scene.view = Similarity2(view.get("rotation", 0.0), view.get("scale", 1.0),
                             view.get("tx", 0.0), view.get("ty", 0.0))

    for i, record in enumerate(doc.get("objects", [])):
        where = f"$.objects[{i}]"
        _require_keys(record, _OBJECT_KEYS, where)
        try:
            obj = SceneObject(
                id=record["id"], kind=record["kind"],
                tx=float(record.get("tx", 0.0)), ty=float(record.get("ty", 0.0)),
                rotation=float(record.get("rotation", 0.0)),
                scale=float(record.get("scale", 1.0)),
                parent=record.get("parent"),
                shape={k: float(v) for k, v in record.get("shape", {}).items()},
                geometry=record.get("geometry", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad object at {where}: {exc}") from None
        if obj.kind not in ("polygon", "ellipse", "spotlight", "figure", "group"):
            raise DocumentError(f"bad object at {where}: unknown kind {obj.kind!r}")
        if obj.id in scene.objects:
            raise DocumentError(f"duplicate object id at {where}: {obj.id}")
        scene.objects[obj.id] = obj
    for obj in scene.objects.values():
        if obj.parent is not None and obj.parent not in scene.objects:
            raise DocumentError(f"unknown parent {obj.parent!r} on object {obj.id}")

    for i, record in enumerate(doc.get("canvases", [])):
        where = f"$.canvases[{i}]"
        _require_keys(record, _CANVAS_KEYS, where)
        try:
            canvas = Canvas(
                id=record["id"],
                region=tuple(float(v) for v in record["region"]),
                attr_paths=tuple(parse_path(p) for p in record.get("attrs", [])),
                z=int(record.get("z", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad canvas at {where}: {exc}") from None
        if len(canvas.region) != 4:
            raise DocumentError(f"bad canvas at {where}: region needs 4 numbers")
        registry.canvases[canvas.id] = canvas
        registry.note_loaded_id(canvas.id)

    for i, record in enumerate(doc.get("discrete", [])):
        where = f"$.discrete[{i}]"
        _require_keys(record, _DISCRETE_KEYS, where)
        try:
            squidget = DiscreteSquidget(
                id=record["id"],
                curve=np.asarray(record["curve"], dtype=float),
                canvas_id=record["canvas"],
                snapshot={parse_path(p): float(v)
                          for p, v in record.get("snapshot", {}).items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad squidget at {where}: {exc}") from None
        if squidget.canvas_id not in registry.canvases:
            raise DocumentError(f"unknown canvas {squidget.canvas_id!r} at {where}")
        registry.discrete[squidget.id] = squidget
        registry.note_loaded_id(squidget.id)

    for i, record in enumerate(doc.get("continuous", [])):
        where = f"$.continuous[{i}]"
        _require_keys(record, _CONTINUOUS_KEYS, where)
        try:
            squidget = ContinuousSquidget(
                id=record["id"],
                members=list(record["members"]),
                path=np.asarray(record["path"], dtype=float),
                weight=float(record.get("weight", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad squidget at {where}: {exc}") from None
        for member in squidget.members:
            if member not in registry.discrete:
                raise DocumentError(f"unknown member {member!r} at {where}")
        registry.continuous[squidget.id] = squidget
        registry.note_loaded_id(squidget.id)

    return scene, registry, config


# ---------------------------------------------------------------------------
# event logs


def dumps_log(events, scene_sha256: str = "", config_sha256: str = "") -> str:
    header = {"format": LOG_FORMAT, "version": VERSION,
              "scene_sha256": scene_sha256, "config_sha256": config_sha256}
    lines = [json.dumps(header)]
    lines.extend(json.dumps(ev.to_json()) for ev in events)
    return "\n".join(lines) + "\n"


def loads_log(text: str) -> tuple[dict, list[SessionEvent]]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DocumentError("empty event log")
    header = _parse_json(lines[0])
    _require_keys(header, {"format", "version", "scene_sha256", "config_sha256"},
                  "$header")
    if header.get("format") != LOG_FORMAT:
        raise DocumentError(f"not an event log: format = {header.get('format')!r}")
    if header.get("version") != VERSION:
        raise DocumentError(f"unsupported log version: {header.get('version')!r}")
    events = []
    last_ts = None
    for i, line in enumerate(lines[1:]):
        record = _parse_json(line)
        try:
            event = SessionEvent.from_json(record)
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad event at line {i + 2}: {exc}") from None
        if last_ts is not None and event.timestamp < last_ts:
            raise DocumentError(f"bad event at line {i + 2}: timestamp decreases")
        last_ts = event.timestamp
        events.append(event)
    return header, events


def verify_log_header(header: dict, scene_text: str, config: EngineConfig) -> None:
    """Check the hashes a log was recorded against, when it carries them."""
    want_scene = header.get("scene_sha256", "")
    if want_scene and want_scene != doc_sha256(scene_text):
        raise DocumentError("event log was recorded against a different scene")
    want_config = header.get("config_sha256", "")
    if want_config and want_config != config.sha256():
        raise DocumentError("event log was recorded against a different config")


def stroke_from_log(events) -> np.ndarray:
    """Extract the single stroke from a stroke file (one down, moves, one up)."""
    downs = [e for e in events if e.kind == "pointer-down"]
    ups = [e for e in events if e.kind == "pointer-up"]
    pointer = [e for e in events if e.kind.startswith("pointer")]
    if len(downs) != 1 or len(ups) != 1 or pointer[0].kind != "pointer-down" \
            or pointer[-1].kind != "pointer-up":
        raise DocumentError("stroke file must hold exactly one down..up sequence")
    return np.array([e.position for e in pointer], dtype=float)
