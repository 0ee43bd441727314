"""Regenerate the bundled demo scenes and event logs.

Each demo is a scene document plus a recorded event log that replays
deterministically.  The script rebuilds both, replays the log against the
scene to confirm the intended outcome, and only then writes the files.

Run from the repository root:

    python3 demos/generate.py
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

import squidgets as sq
from squidgets import document as docio
from squidgets.geometry import resample
from squidgets.session import Session, SessionEvent, replay

OUT = Path(__file__).parent


class Tape:
    def __init__(self, step=2):
        self.t = 0
        self.step = step
        self.events: list[SessionEvent] = []

    def emit(self, kind, pos=None, mods=(), dt=None, **data):
        self.t += self.step if dt is None else dt
        self.events.append(SessionEvent(self.t, kind, pos, frozenset(mods), dict(data)))

    def stroke(self, points, mods=()):
        pts = [tuple(map(float, p)) for p in points]
        self.emit("pointer-down", pts[0], mods)
        for p in pts[1:-1]:
            self.emit("pointer-move", p, mods)
        self.emit("pointer-up", pts[-1], mods)

    def hold_drag(self, points, waypoints, hold_ms=320, samples=3):
        """Draw sparse points, hold at the end, then drag through waypoints."""
        pts = [tuple(map(float, p))
               for p in resample(np.asarray(points, float), samples)]
        self.emit("pointer-down", pts[0])
        for p in pts[1:]:
            self.emit("pointer-move", p)
        self.emit("pointer-move", pts[-1], dt=hold_ms)
        for p in waypoints:
            self.emit("pointer-move", tuple(map(float, p)))
        self.emit("pointer-up", tuple(map(float, waypoints[-1])))


def equilateral(oid, radius=4.0, **tf):
    verts = [(radius * math.cos(a), radius * math.sin(a))
             for a in (math.pi / 2, math.pi / 2 + 2 * math.pi / 3,
                       math.pi / 2 + 4 * math.pi / 3)]
    return sq.polygon(oid, verts, **tf)


def arc_points(cx, cy, r, a0, a1, n=15, sign=1.0):
    return [(cx + sign * r * math.cos(a), cy + r * math.sin(a))
            for a in np.linspace(a0, a1, n)]


def save(name, scene, registry, tape, checks):
    scene_text = docio.dumps_scene(scene, registry, registry.config)
    log_text = docio.dumps_log(tape.events, docio.doc_sha256(scene_text),
                               registry.config.sha256())
    fresh_scene, fresh_registry, config = docio.loads_scene(scene_text)
    session, effects = replay(tape.events, fresh_scene, fresh_registry, config)
    errors = [e for e in effects if e["kind"] == "error"]
    if errors:
        raise SystemExit(f"{name}: replay produced errors: {errors}")
    checks(fresh_scene, fresh_registry, session)
    session.undo_all()
    restored = docio.dumps_scene(fresh_scene, fresh_registry, config)
    if restored != scene_text:
        raise SystemExit(f"{name}: undo-all does not restore the initial document")
    (OUT / f"{name}.scene.json").write_text(scene_text)
    (OUT / f"{name}.log.jsonl").write_text(log_text)
    print(f"{name}: {len(tape.events)} events ok")


def side_normal(segment):
    d = segment[-1] - segment[0]
    return np.array([-d[1], d[0]]) / math.hypot(*d)


def demo_arrange_shapes():
    scene = sq.Scene()
    registry = sq.SquidgetRegistry()
    registry.attach(scene)
    scene.add(equilateral("block_a", radius=4.0, tx=-12.0))
    scene.add(equilateral("block_b", radius=4.0, tx=12.0))
    scene.add(sq.ellipse("disc", 3.0, 3.0, ty=12.0))

    segments = {s.id: s for s in registry.implicit_squidgets(scene)}
    tape = Tape()

    # slide block_a perpendicular to one side
    side_a = segments["block_a:0:0"].segment
    normal = side_normal(side_a)
    tape.stroke(side_a + 2.0 * normal)

    # spin block_b about the side centroid, rotation modifier held
    side_b = segments["block_b:0:1"].segment
    center = side_b.mean(axis=0)
    c, s = math.cos(0.3), math.sin(0.3)
    spun = (side_b - center) @ np.array([[c, -s], [s, c]]).T + center
    tape.emit("modifier-change", mods=("rotate",))
    tape.stroke(spun)
    tape.emit("modifier-change", mods=())

    # grab the disc outline in place, hold, and drag it to a new spot
    ring = segments["disc:0:0"].segment
    anchor = resample(ring, 9)[-1]
    tape.hold_drag(ring, [anchor + np.array([1.5, -0.5]),
                          anchor + np.array([3.0, -1.0])], samples=9)

    def checks(scene2, registry2, session):
        moved = np.array([scene2.get(("block_a", "transform", "tx")),
                          scene2.get(("block_a", "transform", "ty"))])
        assert np.allclose(moved, (-12.0, 0.0) + 2.0 * normal, atol=1e-6), moved
        assert abs(scene2.get(("block_b", "transform", "rotation")) - 0.3) < 1e-6
        assert scene2.get(("block_b", "transform", "tx")) == 12.0
        assert abs(scene2.get(("disc", "transform", "tx")) - 3.0) < 0.1
        assert abs(scene2.get(("disc", "transform", "ty")) - 11.0) < 0.1

    save("arrange_shapes", scene, registry, tape, checks)


def light_switch_fixture():
    scene = sq.Scene()
    registry = sq.SquidgetRegistry()
    registry.attach(scene)
    scene.add(sq.spotlight("lamp", cone_angle=0.2, ty=9.0))
    registry.create_canvas(scene, (20.0, -10.0, 44.0, 10.0), ["lamp"])
    scene.restore(("lamp", "shape", "cone_angle"), 0.6)
    on = registry.create_discrete(scene, arc_points(25.0, 0.0, 4.0, -1.2, 1.2))
    scene.restore(("lamp", "shape", "cone_angle"), 0.2)
    off = registry.create_discrete(scene, arc_points(39.0, 0.0, 4.0, -1.2, 1.2, sign=-1.0))
    registry.create_continuous([(24.0, 0.0), (36.0, 0.0)])
    return scene, registry, on, off


def demo_light_switch():
    scene, registry, on, off = light_switch_fixture()
    cone = ("lamp", "shape", "cone_angle")

    # forward-render the hot-spot at the value the solve stroke aims for
    hotspot = registry.implicit_squidgets(scene)[0]
    assert hotspot.object_id == "lamp"
    scene.restore(cone, 0.45)
    solve_target = registry.regenerate_segment(scene, hotspot)
    scene.restore(cone, 0.2)

    cs = registry.continuous["s1"]
    blend_030, _ = registry.interpolate(cs, 0.3)

    tape = Tape()
    tape.stroke(on.curve)                      # switch on: cone 0.6
    tape.emit("attribute-pick", path="lamp/shape/cone_angle")
    tape.stroke(solve_target)                  # sketch the hot-spot: cone ~0.45
    tape.stroke(blend_030)                     # slide along the switch: blended cone
    tape.stroke(off.curve)                     # switch off: cone 0.2

    def checks(scene2, registry2, session):
        assert scene2.get(cone) == 0.2  # the final bookmark restores exactly
        # the blend stroke pinned the weight where it crossed the track
        assert 0.2 < registry2.continuous["s1"].weight < 0.5

    save("light_switch", scene, registry, tape, checks)


def demo_move_rotate():
    scene = sq.Scene()
    registry = sq.SquidgetRegistry()
    registry.attach(scene)
    scene.add(sq.ellipse("stone", 2.0, 1.0, tx=0.0, ty=30.0))
    registry.create_canvas(scene, (-22.0, -10.0, 22.0, 10.0), ["stone"])
    keys = [(-30.0, 30.0, 0.0), (-10.0, 34.0, 0.5), (10.0, 34.0, 1.0), (30.0, 30.0, 1.5)]
    members = []
    for i, (tx, ty, rot) in enumerate(keys):
        scene.restore(("stone", "transform", "tx"), tx)
        scene.restore(("stone", "transform", "ty"), ty)
        scene.restore(("stone", "transform", "rotation"), rot)
        x = -16.5 + 11.0 * i
        members.append(registry.create_discrete(
            scene, arc_points(x, 0.0, 4.0, -1.1 - 0.2 * i, 1.1 + 0.2 * i)))
    for tx, ty, rot in keys[:1]:
        scene.restore(("stone", "transform", "tx"), tx)
        scene.restore(("stone", "transform", "ty"), ty)
        scene.restore(("stone", "transform", "rotation"), rot)
    registry.create_continuous([(-19.0, 0.0), (21.5, 0.0)])
    cs = registry.continuous["s1"]

    blend_half, _ = registry.interpolate(cs, 0.5)
    blend_060, _ = registry.interpolate(cs, 0.6)

    tape = Tape()
    # cross the track and hold, then drag the state to the far end
    tape.hold_drag(blend_half, [cs.path[2], cs.path[3] + np.array([4.0, 0.0])])
    # two-stroke flow: pick the track by shape, then place the state at 0.25
    tape.emit("modifier-change", mods=("select-first",))
    tape.stroke(blend_060 + np.array([0.0, -6.0]))
    tape.emit("modifier-change", mods=())
    quarter, _ = registry.interpolate(cs, 0.25)
    tape.stroke(quarter)

    def checks(scene2, registry2, session):
        # the last stroke pinned the weight where it crossed the track,
        # somewhere in the first span; the applied pose must agree with it
        w = registry2.continuous["s1"].weight
        assert 0.15 < w < 0.35, w
        u = 3.0 * w
        assert scene2.get(("stone", "transform", "tx")) == (1 - u) * -30.0 + u * -10.0
        assert scene2.get(("stone", "transform", "rotation")) == u * 0.5

    save("move_rotate", scene, registry, tape, checks)


def demo_nested():
    scene = sq.Scene()
    registry = sq.SquidgetRegistry()
    registry.attach(scene)
    scene.add(equilateral("boat", radius=3.0, tx=-30.0, ty=40.0))
    scene.add(sq.ellipse("moon", 2.0, 2.0, tx=30.0, ty=40.0))

    registry.create_canvas(scene, (-21.0, -10.0, -1.0, 10.0), ["boat"])
    scene.restore(("boat", "transform", "tx"), -30.0)
    d1 = registry.create_discrete(scene, arc_points(-16.0, 0.0, 4.0, -1.1, 1.1))
    scene.restore(("boat", "transform", "tx"), -20.0)
    d2 = registry.create_discrete(scene, arc_points(-6.0, 0.0, 4.0, -1.3, 1.3, sign=-1.0))
    scene.restore(("boat", "transform", "tx"), -30.0)
    registry.create_continuous([(-18.0, 0.0), (-4.0, 0.0)])

    registry.create_canvas(scene, (1.0, -10.0, 21.0, 10.0), ["moon"])
    scene.restore(("moon", "transform", "ty"), 40.0)
    d3 = registry.create_discrete(scene, arc_points(6.0, 0.0, 4.0, -1.1, 1.1))
    scene.restore(("moon", "transform", "ty"), 46.0)
    d4 = registry.create_discrete(scene, arc_points(16.0, 0.0, 4.0, -1.3, 1.3, sign=-1.0))
    scene.restore(("moon", "transform", "ty"), 40.0)
    registry.create_continuous([(4.0, 0.0), (18.0, 0.0)])
    s_boat, s_moon = registry.continuous["s1"], registry.continuous["s2"]

    tape = Tape()
    # drag each child squidget to its far end (weight exactly 1)
    for cs in (s_boat, s_moon):
        blend, _ = registry.interpolate(cs, 0.5)
        tape.hold_drag(blend, [cs.path[1], cs.path[1] + np.array([6.0, 0.0])])

    # author the parent: a canvas that collects both child weights
    tape.emit("mode-switch", mode="create")
    tape.emit("selection-change", ids=["s1", "s2"])
    tape.emit("canvas-create", region=[-12.0, -34.0, 12.0, -14.0])
    # first key at (w1, w2) = (1, 1)
    tape.stroke(arc_points(-7.0, -24.0, 4.0, -1.1, 1.1))
    tape.emit("mode-switch", mode="control")
    # pull both children back to zero before the second key
    for cs in (s_boat, s_moon):
        blend, _ = registry.interpolate(cs, 0.5)
        tape.hold_drag(blend, [cs.path[0], cs.path[0] - np.array([6.0, 0.0])])
    tape.emit("mode-switch", mode="create")
    tape.stroke(arc_points(7.0, -24.0, 4.0, -1.3, 1.3, sign=-1.0))
    # connect the two keys into the parent squidget
    tape.stroke([(-9.0, -24.0), (9.0, -24.0)])
    tape.emit("mode-switch", mode="control")

    # one stroke on the parent drives both children halfway; the curve
    # midpoints the replay will produce are deterministic, so the stroke can
    # be placed exactly between them up front
    from squidgets.geometry import smooth

    def authored_mid(points):
        raw = np.asarray(points, dtype=float)
        return resample(smooth(raw, registry.config.smooth_iterations),
                        registry.config.resample_n).mean(axis=0)

    d5_mid = authored_mid(arc_points(-7.0, -24.0, 4.0, -1.1, 1.1))
    d6_mid = authored_mid(arc_points(7.0, -24.0, 4.0, -1.3, 1.3, sign=-1.0))
    parent_mid = [tuple(0.5 * (d5_mid + d6_mid) + np.array([0.0, dy]))
                  for dy in np.linspace(-4.0, 4.0, 9)]
    tape.stroke(parent_mid)

    def checks(scene2, registry2, session):
        assert registry2.continuous["s3"].members == ["d5", "d6"]
        assert abs(registry2.continuous["s1"].weight - 0.5) < 1e-9
        assert abs(registry2.continuous["s2"].weight - 0.5) < 1e-9
        assert abs(scene2.get(("boat", "transform", "tx")) + 25.0) < 1e-7
        assert abs(scene2.get(("moon", "transform", "ty")) - 43.0) < 1e-7

    save("nested", scene, registry, tape, checks)


def main():
    demo_arrange_shapes()
    demo_light_switch()
    demo_move_rotate()
    demo_nested()


if __name__ == "__main__":
    sys.exit(main())
