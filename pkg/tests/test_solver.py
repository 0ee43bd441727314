import math

import numpy as np
import pytest

import squidgets as sq
from squidgets.errors import SolveError
from squidgets.matching import MatchResult, match_implicit, select
from squidgets.scene import attr_range
from squidgets.solver import (
    apply_continuous,
    apply_discrete,
    apply_implicit_transform,
    drag_update,
    golden_section,
    scalar_objective,
    solve_scalar,
    start_drag,
)

from conftest import equilateral, make_scene, rotate_about


def two_member_setup(tx_values=(0.0, 10.0)):
    scene, registry = make_scene()
    scene.add(sq.ellipse("egg", tx=tx_values[0]))
    registry.create_canvas(scene, (-30, -20, 30, 20), ["egg"])
    members = []
    for i, tx in enumerate(tx_values):
        scene.set(("egg", "transform", "tx"), tx)
        x = -10.0 + 8.0 * i
        members.append(registry.create_discrete(
            scene, [(x, -5.0 + 0.5 * k) for k in range(21)]))
    cs = registry.create_continuous([(-12.0, 0.0), (0.0, 0.0)])
    scene.set(("egg", "transform", "tx"), tx_values[0])
    return scene, registry, members, cs


class TestApplyDiscrete:
    def test_restores_creation_values(self):
        scene, registry, members, _ = two_member_setup()
        scene.set(("egg", "transform", "tx"), 99.0)
        match = MatchResult(members[1].id, "discrete", 0.0, 1.0)
        apply_discrete(match, registry, scene)
        assert scene.get(("egg", "transform", "tx")) == 10.0

    def test_noop_when_already_there(self):
        scene, registry, members, _ = two_member_setup()
        match = MatchResult(members[0].id, "discrete", 0.0, 1.0)
        update = apply_discrete(match, registry, scene)
        assert all(c.old == c.new for c in update.changes)

    def test_stale_entry_skipped(self):
        scene, registry, members, _ = two_member_setup()
        members[0].snapshot[("ghost", "transform", "tx")] = 1.0
        match = MatchResult(members[0].id, "discrete", 0.0, 1.0)
        update = apply_discrete(match, registry, scene)
        assert any("ghost" in w for w in update.warnings)
        assert any(c.path == ("egg", "transform", "tx") for c in update.changes)


class TestApplyContinuous:
    def test_w_zero_equals_member_zero(self):
        scene, registry, members, cs = two_member_setup()
        scene.set(("egg", "transform", "tx"), 55.0)
        match = MatchResult(cs.id, "continuous", 0.0, 1.0, w=0.0)
        apply_continuous(match, registry, scene)
        assert scene.get(("egg", "transform", "tx")) == members[0].snapshot[
            ("egg", "transform", "tx")]

    def test_linear_blend(self):
        scene, registry, _, cs = two_member_setup()
        match = MatchResult(cs.id, "continuous", 0.0, 1.0, w=0.3)
        apply_continuous(match, registry, scene)
        assert scene.get(("egg", "transform", "tx")) == pytest.approx(3.0)
        assert registry.continuous[cs.id].weight == 0.3

    def test_monotone_in_w(self):
        scene, registry, _, cs = two_member_setup()
        previous = -math.inf
        for w in np.linspace(0, 1, 17):
            apply_continuous(MatchResult(cs.id, "continuous", 0.0, 1.0, w=float(w)),
                             registry, scene)
            tx = scene.get(("egg", "transform", "tx"))
            assert tx >= previous
            previous = tx

    def test_held_attribute_constant(self):
        scene, registry, members, cs = two_member_setup()
        only_first = ("egg", "shape", "radius_y")
        del members[1].snapshot[only_first]
        for w in (0.2, 0.8):
            apply_continuous(MatchResult(cs.id, "continuous", 0.0, 1.0, w=w),
                             registry, scene)
            assert scene.get(only_first) == members[0].snapshot[only_first]


class TestApplyImplicit:
    def test_pure_translation_moves_tx(self):
        scene, registry = make_scene()
        scene.add(equilateral("tri", radius=4.0))
        side = registry.implicit_squidgets(scene)[0]
        direction = side.segment[-1] - side.segment[0]
        normal = np.array([-direction[1], direction[0]]) / np.hypot(*direction)
        stroke = side.segment + 3.0 * normal
        match = match_implicit(stroke, side, scene, registry.config)
        apply_implicit_transform(match, scene, "full")
        assert scene.get(("tri", "transform", "tx")) == pytest.approx(3.0 * normal[0], abs=1e-9)
        assert scene.get(("tri", "transform", "ty")) == pytest.approx(3.0 * normal[1], abs=1e-9)

    def test_rotate_only_drops_translation(self):
        scene, registry = make_scene()
        scene.add(equilateral("tri", radius=4.0))
        side = registry.implicit_squidgets(scene)[0]
        direction = side.segment[-1] - side.segment[0]
        normal = np.array([-direction[1], direction[0]]) / np.hypot(*direction)
        stroke = rotate_about(side.segment, 0.25, side.segment.mean(axis=0)) + 2.0 * normal
        match = match_implicit(stroke, side, scene, registry.config)
        apply_implicit_transform(match, scene, "rotate")
        assert scene.get(("tri", "transform", "rotation")) != 0.0
        assert scene.get(("tri", "transform", "tx")) == 0.0
        assert scene.get(("tri", "transform", "ty")) == 0.0

    def test_translate_only_drops_rotation(self):
        scene, registry = make_scene()
        scene.add(equilateral("tri", radius=4.0))
        side = registry.implicit_squidgets(scene)[0]
        stroke = rotate_about(side.segment, 0.3, side.segment.mean(axis=0))
        match = match_implicit(stroke, side, scene, registry.config)
        apply_implicit_transform(match, scene, "translate")
        assert scene.get(("tri", "transform", "rotation")) == 0.0

    def test_scale_constraint_uses_rms_ratio(self):
        # resize gesture: redraw a circle contour half again as large
        scene, registry = make_scene()
        scene.add(sq.ellipse("disc", 2.0, 2.0))
        ring = registry.implicit_squidgets(scene)[0]
        center = ring.segment.mean(axis=0)
        stroke = center + 1.5 * (ring.segment - center)
        match = match_implicit(stroke, ring, scene, registry.config)
        apply_implicit_transform(match, scene, "scale")
        assert scene.get(("disc", "transform", "scale")) == pytest.approx(1.5, rel=1e-2)

    def test_fixed_point_after_apply(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            scene, registry = make_scene()
            scene.add(equilateral("tri", radius=rng.uniform(2, 6),
                                  tx=rng.uniform(-5, 5), ty=rng.uniform(-5, 5),
                                  rotation=rng.uniform(-1, 1)))
            side = registry.implicit_squidgets(scene)[int(rng.integers(0, 3))]
            direction = side.segment[-1] - side.segment[0]
            normal = np.array([-direction[1], direction[0]]) / np.hypot(*direction)
            stroke = rotate_about(side.segment, rng.uniform(-0.4, 0.4),
                                  side.segment.mean(axis=0)) + rng.uniform(-2, 2) * normal
            match = match_implicit(stroke, side, scene, registry.config)
            apply_implicit_transform(match, scene, "full")
            moved = next(s for s in registry.implicit_squidgets(scene) if s.id == side.id)
            again = match_implicit(stroke, moved, scene, registry.config)
            assert abs(again.transform.rotation) < 1e-6
            assert np.hypot(again.transform.tx, again.transform.ty) < 1e-6


class TestSolveScalar:
    def lamp_scene(self, cone=0.4):
        scene, registry = make_scene()
        scene.add(sq.spotlight("lamp", cone_angle=cone, ty=9.0))
        hotspot = registry.implicit_squidgets(scene)[0]
        assert hotspot.contour_index == 0
        return scene, registry, hotspot

    def stroke_at(self, scene, registry, hotspot, value):
        path = ("lamp", "shape", "cone_angle")
        original = scene.get(path)
        scene.restore(path, value)
        segment = registry.regenerate_segment(scene, hotspot)
        scene.restore(path, original)
        return segment

    def test_stroke_at_current_value_returns_it(self):
        scene, registry, hotspot = self.lamp_scene(0.4)
        stroke = self.stroke_at(scene, registry, hotspot, 0.4)
        update = solve_scalar(stroke, hotspot, ("lamp", "shape", "cone_angle"),
                              scene, registry)
        rng = attr_range(scene.object("lamp"), "cone_angle")
        assert update.changes[-1].new == pytest.approx(0.4, abs=1e-4 * rng.span)

    def test_spotlight_inversion(self):
        scene, registry, hotspot = self.lamp_scene(0.4)
        stroke = self.stroke_at(scene, registry, hotspot, 0.5)
        update = solve_scalar(stroke, hotspot, ("lamp", "shape", "cone_angle"),
                              scene, registry)
        assert update.changes[-1].new == pytest.approx(0.5, abs=1e-3)
        assert scene.get(("lamp", "shape", "cone_angle")) == update.changes[-1].new

    def test_never_leaves_range_and_never_worse(self):
        scene, registry, hotspot = self.lamp_scene(0.1)
        path = ("lamp", "shape", "cone_angle")
        rng = attr_range(scene.object("lamp"), "cone_angle")
        # a stroke far wider than the window can reach
        stroke = self.stroke_at(scene, registry, hotspot, rng.hi - 1e-4)
        g = scalar_objective(stroke, hotspot, path, scene, registry)
        g_start = g(0.1)
        update = solve_scalar(stroke, hotspot, path, scene, registry)
        solved = update.changes[-1].new
        assert rng.lo <= solved <= rng.hi
        assert g(solved) <= g_start

    def test_matches_grid_oracle(self):
        scene, registry, hotspot = self.lamp_scene(0.45)
        path = ("lamp", "shape", "cone_angle")
        rng = attr_range(scene.object("lamp"), "cone_angle")
        stroke = self.stroke_at(scene, registry, hotspot, 0.52)
        update = solve_scalar(stroke, hotspot, path, scene, registry)
        g = scalar_objective(stroke, hotspot, path, scene, registry)
        lo = max(rng.lo, 0.45 - 0.25 * rng.span)
        hi = min(rng.hi, 0.45 + 0.25 * rng.span)
        grid_min = min(g(v) for v in np.linspace(lo, hi, 2000))
        assert g(update.changes[-1].new) <= grid_min + 1e-9

    def test_unbounded_attribute_rejected(self):
        scene, registry = make_scene()
        scene.add(equilateral("tri"))
        side = registry.implicit_squidgets(scene)[0]
        with pytest.raises(SolveError, match="not a shape parameter"):
            solve_scalar(side.segment, side, ("tri", "transform", "tx"),
                         scene, registry)

    def test_golden_section_quadratic(self):
        x, fx = golden_section(lambda v: (v - 1.3) ** 2, 0.0, 2.0, 1e-8)
        assert x == pytest.approx(1.3, abs=1e-6)


class TestDrag:
    def test_pointer_at_path_start_gives_zero(self):
        scene, registry, members, cs = two_member_setup()
        match = MatchResult(cs.id, "continuous", 0.0, 1.0, w=0.7)
        drag = start_drag(match, cs.path[0], scene)
        drag_update(drag, cs.path[0], scene, registry)
        assert registry.continuous[cs.id].weight == 0.0

    def test_pointer_walk_slides_weight(self):
        scene, registry, members, cs = two_member_setup()
        match = MatchResult(cs.id, "continuous", 0.0, 1.0, w=0.0)
        drag = start_drag(match, cs.path[0], scene)
        quarter = 0.75 * cs.path[0] + 0.25 * cs.path[1]
        drag_update(drag, quarter, scene, registry)
        assert registry.continuous[cs.id].weight == pytest.approx(0.25, abs=1e-9)
        assert scene.get(("egg", "transform", "tx")) == pytest.approx(2.5)

    def test_implicit_drag_moves_by_screen_delta(self):
        scene, registry = make_scene()
        scene.add(equilateral("tri", radius=4.0))
        side = registry.implicit_squidgets(scene)[0]
        match = match_implicit(side.segment, side, scene, registry.config)
        apply_implicit_transform(match, scene, "full")
        origin = np.array([0.0, 0.0])
        drag = start_drag(match, origin, scene)
        # drag state snapshots the pre-apply pose, which is the identity here
        drag.base_pose = (0.0, 0.0, 0.0)
        drag_update(drag, origin + [2.5, 0.0], scene, registry)
        assert scene.get(("tri", "transform", "tx")) == pytest.approx(2.5, abs=1e-9)
        drag_update(drag, origin + [4.0, 1.0], scene, registry)
        assert scene.get(("tri", "transform", "tx")) == pytest.approx(4.0, abs=1e-9)
        assert scene.get(("tri", "transform", "ty")) == pytest.approx(1.0, abs=1e-9)


class TestFigureJoints:
    def arm_scene(self):
        scene, registry = make_scene()
        scene.add(sq.figure("arm", limbs=[(4.0, 0.5), (3.0, 0.4)], joints=[0.3, 0.2]))
        return scene, registry

    def test_joint_angles_are_ranged_attributes(self):
        scene, _ = self.arm_scene()
        rng = attr_range(scene.object("arm"), "joint_1")
        assert rng is not None and rng.wrap

    def test_limb_segments_bound_to_joints(self):
        scene, registry = self.arm_scene()
        segments = registry.implicit_squidgets(scene)
        assert {s.contour_index for s in segments} == {0, 1}
        assert all(("arm", "shape", "joint_1") in s.attr_paths for s in segments)

    def test_joint_inversion_from_sketched_limb(self):
        # redraw the forearm capsule where it would sit at a different angle
        scene, registry = self.arm_scene()
        path = ("arm", "shape", "joint_1")
        forearm = next(s for s in registry.implicit_squidgets(scene)
                       if s.contour_index == 1)
        scene.restore(path, 0.7)
        target = registry.regenerate_segment(scene, forearm)
        scene.restore(path, 0.2)
        update = solve_scalar(target, forearm, path, scene, registry)
        # corner-split pieces cover slightly different arcs as the joint
        # moves, so the inversion is close rather than exact
        assert update.changes[-1].new == pytest.approx(0.7, abs=0.02)
