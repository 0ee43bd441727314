import math

import numpy as np
import pytest

import squidgets as sq
from squidgets.errors import SceneError
from squidgets.scene import attr_range

from conftest import make_scene


def basic_scene():
    scene = sq.Scene()
    scene.add(sq.ellipse("egg", 2.0, 1.0, tx=1.0, ty=2.0))
    scene.add(sq.spotlight("lamp", cone_angle=0.4, ty=9.0))
    scene.add(sq.group("grp", tx=2.0))
    scene.add(sq.polygon("tri", [(0, 0), (1, 0), (0, 1)], parent="grp"))
    return scene


class TestAttributes:
    def test_get_after_set(self):
        scene = basic_scene()
        scene.set(("egg", "transform", "tx"), 5.0)
        assert scene.get(("egg", "transform", "tx")) == 5.0

    def test_scale_range_violation(self):
        scene = basic_scene()
        with pytest.raises(SceneError, match="range violation"):
            scene.set(("egg", "transform", "scale"), -1.0)

    def test_unknown_attribute(self):
        scene = basic_scene()
        with pytest.raises(SceneError, match="unknown attribute"):
            scene.get(("egg", "shape", "bogus"))
        with pytest.raises(SceneError, match="unknown attribute"):
            scene.set(("nobody", "transform", "tx"), 0.0)

    def test_change_record_restores(self):
        scene = basic_scene()
        (change,) = scene.set(("egg", "transform", "tx"), 5.0)
        assert (change.old, change.new) == (1.0, 5.0)
        scene.restore(change.path, change.old)
        assert scene.get(("egg", "transform", "tx")) == 1.0

    def test_rotation_wraps(self):
        scene = basic_scene()
        scene.set(("egg", "transform", "rotation"), 3 * math.pi)
        assert scene.get(("egg", "transform", "rotation")) == pytest.approx(math.pi)

    def test_cone_angle_range(self):
        scene = basic_scene()
        with pytest.raises(SceneError, match="range violation"):
            scene.set(("lamp", "shape", "cone_angle"), math.pi / 2)
        rng = attr_range(scene.object("lamp"), "cone_angle")
        assert 0.0 < rng.lo and rng.hi < math.pi / 2

    def test_unbounded_attrs_have_no_range(self):
        scene = basic_scene()
        assert attr_range(scene.object("egg"), "tx") is None


class TestCollect:
    def test_empty_selection(self):
        assert basic_scene().collect([]) == {}

    def test_single_ellipse_paths(self):
        snap = basic_scene().collect(["egg"])
        names = sorted("/".join(p) for p in snap)
        assert names == [
            "egg/shape/radius_x", "egg/shape/radius_y",
            "egg/transform/rotation", "egg/transform/scale",
            "egg/transform/tx", "egg/transform/ty",
        ]

    def test_group_includes_descendants(self):
        snap = basic_scene().collect(["grp"])
        assert ("grp", "transform", "tx") in snap
        assert ("tri", "transform", "tx") in snap

    def test_superset_of_subset(self):
        scene = basic_scene()
        full = scene.collect(["egg", "lamp"])
        part = scene.collect(["lamp"])
        assert set(part) <= set(full)

    def test_unknown_id(self):
        with pytest.raises(SceneError, match="unknown id"):
            basic_scene().collect(["ghost"])


class TestTransforms:
    def test_identity_chain(self):
        scene = sq.Scene()
        scene.add(sq.ellipse("e"))
        x = scene.local_to_screen("e")
        pts = np.array([[1, 2], [3, 4]], dtype=float)
        assert np.allclose(x.apply(pts), pts)

    def test_child_includes_parent_translation(self):
        scene = basic_scene()
        x = scene.local_to_screen("tri")
        assert np.allclose(x.apply([[0, 0]]), [[2.0, 0.0]])

    def test_screen_round_trip(self):
        scene = basic_scene()
        scene.view = sq.Similarity2(0.3, 2.0, 5.0, -1.0)
        x = scene.local_to_screen("tri")
        pts = np.array([[0.5, 0.25], [3, -2]], dtype=float)
        assert np.allclose(x.inverse().apply(x.apply(pts)), pts, atol=1e-9)


class TestContours:
    def test_unit_circle(self):
        scene = sq.Scene()
        scene.add(sq.ellipse("c", 1.0, 1.0))
        (ring,) = scene.contour("c")
        assert len(ring) == 64
        radii = np.hypot(ring[:, 0], ring[:, 1])
        assert np.abs(radii - 1.0).max() < 1e-6
        assert np.array_equal(ring[0], ring[-1])

    def test_rotated_square_corners(self):
        scene = sq.Scene()
        scene.add(sq.polygon("sq", [(1, 1), (-1, 1), (-1, -1), (1, -1)],
                             rotation=math.pi / 4))
        (ring,) = scene.contour("sq")
        expected = math.sqrt(2.0)
        corners = ring[:-1]
        assert np.allclose(np.abs(corners).max(axis=1), expected, atol=1e-12)

    def test_contour_deterministic(self):
        scene = basic_scene()
        a = scene.contour("lamp")
        b = scene.contour("lamp")
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_translation_equivariance(self):
        scene = basic_scene()
        before = scene.contour("lamp")
        scene.set(("lamp", "transform", "tx"), 4.0)
        scene.set(("lamp", "transform", "ty"), 11.5)
        after = scene.contour("lamp")
        shift = np.array([4.0, 11.5 - 9.0])
        for x, y in zip(before, after):
            assert np.abs((x + shift) - y).max() < 1e-9

    def test_rotation_equivariance_about_pivot(self):
        scene = basic_scene()
        before = scene.contour("egg")
        pivot = np.array([1.0, 2.0])
        scene.set(("egg", "transform", "rotation"), 0.8)
        after = scene.contour("egg")
        c, s = math.cos(0.8), math.sin(0.8)
        rot = np.array([[c, -s], [s, c]])
        for x, y in zip(before, after):
            assert np.abs(((x - pivot) @ rot.T + pivot) - y).max() < 1e-9

    def test_spotlight_pieces(self):
        scene = basic_scene()
        pieces = scene.contour("lamp")
        assert len(pieces) == 3
        ring, edge_a, edge_b = pieces
        assert len(ring) == 64 and len(edge_a) == 2 and len(edge_b) == 2
        # both edges start at the apex
        assert np.allclose(edge_a[0], [0.0, 9.0])
        assert np.allclose(edge_b[0], [0.0, 9.0])

    def test_cone_angle_grows_hot_spot(self):
        scene = basic_scene()

        def major_axis():
            ring = scene.contour("lamp")[0]
            return ring[:, 0].max() - ring[:, 0].min()

        narrow = major_axis()
        scene.set(("lamp", "shape", "cone_angle"), 0.8)
        assert major_axis() > narrow

    def test_figure_limbs(self):
        scene = sq.Scene()
        scene.add(sq.figure("fig", limbs=[(2.0, 0.3), (1.5, 0.2)],
                            joints=[0.0, math.pi / 4]))
        pieces = scene.contour("fig")
        assert len(pieces) == 2
        assert all(len(p) == 64 for p in pieces)

    def test_group_has_no_contour(self):
        scene = basic_scene()
        assert scene.contour("grp") == []


class TestHierarchy:
    def test_duplicate_id_rejected(self):
        scene = basic_scene()
        with pytest.raises(SceneError, match="duplicate"):
            scene.add(sq.ellipse("egg"))

    def test_unknown_parent_rejected(self):
        scene = basic_scene()
        with pytest.raises(SceneError, match="unknown parent"):
            scene.add(sq.ellipse("x", parent="ghost"))

    def test_undo_records_compose(self):
        scene = basic_scene()
        initial = scene.collect(["egg", "lamp", "grp", "tri"])
        changes = []
        changes += scene.set(("egg", "transform", "tx"), 7.0)
        changes += scene.set(("lamp", "shape", "cone_angle"), 0.9)
        changes += scene.set(("egg", "transform", "tx"), -3.0)
        for change in reversed(changes):
            scene.restore(change.path, change.old)
        assert scene.collect(["egg", "lamp", "grp", "tri"]) == initial
