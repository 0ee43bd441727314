"""Engine bridge for the browser client.

The UI is a thin peer: it sends serialized session events over a websocket
and receives the effects each event produced, tagged with the same sequence
number.  All geometry the client draws comes from snapshots rendered here
in screen space, so the client never owns authoritative state.

Message shapes (JSON):

    inbound   {"seq": n, "event": {...}}           one session event
              {"seq": n, "request": "snapshot"}    render-ready scene state
              {"seq": n, "request": "document"}    canonical scene document text
              {"seq": n, "request": "undo" | "redo"}
    outbound  {"seq": n, "effects": [...]}         ack for an event
              {"seq": n, "snapshot": {...}}
              {"seq": n, "document": "..."}
              {"seq": 0, "hello": {...}}           once, on connect
              {"seq": n, "error": "..."}

Client sequence numbers must increase strictly; replies reuse the inbound
number so the client can pair them up.

Note: no postponed annotations here. FastAPI must see the real WebSocket
class on the endpoint signature, and it is imported lazily inside
create_app so the optional dependency stays optional.
"""

import json
from pathlib import Path

from . import document as docio
from .errors import SessionError, SquidgetError
from .session import Session, SessionEvent


def _screen_points(scene, world_points) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in scene.view.apply(world_points)]


def build_snapshot(session: Session) -> dict:
    """Everything the client needs to draw one frame, in screen coordinates."""
    scene = session.scene
    registry = session.registry
    objects = []
    for oid in scene.objects:
        objects.append({
            "id": oid,
            "kind": scene.objects[oid].kind,
            "contours": [_screen_points(scene, c) for c in scene.contour(oid)],
        })
    canvases = []
    for canvas in sorted(registry.canvases.values(), key=lambda c: c.z):
        canvases.append({
            "id": canvas.id,
            "region": _screen_points(scene, canvas.boundary()),
            "z": canvas.z,
        })
    discrete = [{
        "id": d.id,
        "canvas": d.canvas_id,
        "curve": _screen_points(scene, d.curve),
    } for d in sorted(registry.discrete.values(), key=lambda d: d.id)]
    continuous = [{
        "id": s.id,
        "members": list(s.members),
        "path": _screen_points(scene, s.path),
        "weight": s.weight,
    } for s in sorted(registry.continuous.values(), key=lambda s: s.id)]
    return {
        "mode": session.mode,
        "selection": list(session.selection),
        "pending": session.pending.squidget_id if session.pending else None,
        "objects": objects,
        "canvases": canvases,
        "discrete": discrete,
        "continuous": continuous,
        "attributes": {
            oid: {"/".join(p[1:]): scene.get(p) for p in scene.object_paths(oid)}
            for oid in scene.objects
        },
    }


class EngineBridge:
    """One client connection worth of protocol state."""

    def __init__(self, session: Session, scene_text: str):
        self.session = session
        self.scene_text = scene_text
        self._last_seq = 0

    def hello(self) -> dict:
        config = self.session.config
        return {"seq": 0, "hello": {
            "scene_sha256": docio.doc_sha256(self.scene_text),
            "config_sha256": config.sha256(),
            "hold_ms": config.hold_ms,
            "snapshot": build_snapshot(self.session),
        }}

    def handle(self, payload: dict) -> dict:
        seq = payload.get("seq")
        if not isinstance(seq, int) or seq <= self._last_seq:
            return {"seq": seq, "error": "sequence numbers must increase strictly"}
        self._last_seq = seq
        try:
            if "event" in payload:
                event = SessionEvent.from_json(payload["event"])
                effects = self.session.handle(event)
                return {"seq": seq, "effects": effects}
            request = payload.get("request")
            if request == "snapshot":
                return {"seq": seq, "snapshot": build_snapshot(self.session)}
            if request == "document":
                text = docio.dumps_scene(self.session.scene, self.session.registry,
                                         self.session.config)
                return {"seq": seq, "document": text}
            if request == "undo":
                return {"seq": seq, "effects": [{"kind": "undo",
                                                 "done": self.session.undo()}]}
            if request == "redo":
                return {"seq": seq, "effects": [{"kind": "redo",
                                                 "done": self.session.redo()}]}
            return {"seq": seq, "error": f"unknown request: {request!r}"}
        except (SessionError, SquidgetError) as exc:
            return {"seq": seq, "error": str(exc)}


def load_bridge(scene_path: str, overrides=()) -> EngineBridge:
    scene_text = Path(scene_path).read_text()
    scene, registry, config = docio.loads_scene(scene_text)
    for key, value in overrides:
        config.override(key, value)
    registry.config = config
    return EngineBridge(Session(scene, registry, config), scene_text)


def create_app(scene_path: str, overrides=()):
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.responses import FileResponse, PlainTextResponse
    from fastapi.staticfiles import StaticFiles

    app = FastAPI(title="squidgets")
    frontend = Path(__file__).resolve().parents[2] / "frontend"

    @app.get("/")
    async def index():
        page = frontend / "public" / "index.html"
        if page.exists():
            return FileResponse(page)
        return PlainTextResponse("frontend not built; see frontend/README.md")

    dist = frontend / "dist"
    if dist.is_dir():
        app.mount("/dist", StaticFiles(directory=dist), name="dist")

    @app.websocket("/ws")
    async def socket(ws: WebSocket):
        await ws.accept()
        # each connection drives its own session over the same document
        bridge = load_bridge(scene_path, overrides)
        await ws.send_text(json.dumps(bridge.hello()))
        try:
            while True:
                payload = json.loads(await ws.receive_text())
                await ws.send_text(json.dumps(bridge.handle(payload)))
        except WebSocketDisconnect:
            pass

    return app


def serve(scene_path: str, host: str = "127.0.0.1", port: int = 8765,
          overrides=()) -> None:
    import uvicorn

    uvicorn.run(create_app(scene_path, overrides), host=host, port=port,
                log_level="warning")
