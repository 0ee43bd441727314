import math

import numpy as np
import pytest

import squidgets as sq


def rotate_about(points, angle, pivot):
    pts = np.asarray(points, dtype=float)
    pivot = np.asarray(pivot, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return (pts - pivot) @ rot.T + pivot


def grid_fit_residual(source, target, steps=3600):
    """Brute-force rigid fit oracle: best residual over an angle grid.

    For each angle the optimal translation is the centroid difference, so
    only the rotation needs the grid.
    """
    s = np.asarray(source, dtype=float)
    t = np.asarray(target, dtype=float)
    sh = s - s.mean(axis=0)
    th = t - t.mean(axis=0)
    angles = np.linspace(-math.pi, math.pi, steps, endpoint=False)
    cos, sin = np.cos(angles), np.sin(angles)
    rx = cos[:, None] * sh[:, 0] - sin[:, None] * sh[:, 1]
    ry = sin[:, None] * sh[:, 0] + cos[:, None] * sh[:, 1]
    res = ((rx - th[:, 0]) ** 2 + (ry - th[:, 1]) ** 2).sum(axis=1)
    return float(res.min())


def fit_residual(source, target, transform):
    moved = transform.apply(source)
    d = moved - np.asarray(target, dtype=float)
    return float((d * d).sum())


@pytest.fixture
def unit_square():
    return np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)


def make_scene():
    scene = sq.Scene()
    registry = sq.SquidgetRegistry()
    registry.attach(scene)
    return scene, registry


def equilateral(oid, cx=0.0, cy=0.0, radius=1.0, **tf):
    """A triangle whose vertices land exactly on the 63-point contour ring,
    so every corner-split segment is exactly straight."""
    verts = [(cx + radius * math.cos(a), cy + radius * math.sin(a))
             for a in (math.pi / 2, math.pi / 2 + 2 * math.pi / 3,
                       math.pi / 2 + 4 * math.pi / 3)]
    return sq.polygon(oid, verts, **tf)
