"""Pure 2D polyline kernels shared by the rest of the engine.

Polylines are float64 arrays of shape (n, 2).  Every function here is a
pure value computation: inputs are never mutated and no state is kept, so
the kernels are safe to call concurrently from anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

TAU = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Normalize an angle to the half-open interval (-pi, pi]."""
    r = math.remainder(a, TAU)
    return math.pi if r <= -math.pi else r


@dataclass
class RigidTransform2:
    """Rotation about the origin followed by a translation."""

    rotation: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self):
        self.rotation = wrap_angle(float(self.rotation))
        if not (math.isfinite(self.tx) and math.isfinite(self.ty)):
            raise GeometryError("non-finite translation")

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix().T + self.translation

    def compose(self, other: "RigidTransform2") -> "RigidTransform2":
        """Transform equal to applying `other` first, then `self`."""
        t = self.matrix() @ other.translation + self.translation
        return RigidTransform2(self.rotation + other.rotation, t[0], t[1])

    def inverse(self) -> "RigidTransform2":
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        tx = -(c * self.tx - s * self.ty)
        ty = -(s * self.tx + c * self.ty)
        return RigidTransform2(-self.rotation, tx, ty)


@dataclass
class Similarity2:
    """Uniform scale and rotation about the origin, then a translation.

    Used for object local transforms and the world-to-screen view, both of
    which carry a scale on top of the rigid part.
    """

    rotation: float = 0.0
    scale: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self):
        if self.scale <= 0 or not math.isfinite(self.scale):
            raise GeometryError("similarity scale must be positive")
        self.rotation = wrap_angle(float(self.rotation))

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return self.scale * np.array([[c, -s], [s, c]])

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix().T + self.translation

    def linear(self, vec) -> np.ndarray:
        """Apply only the rotation and scale to a direction vector."""
        return self.matrix() @ np.asarray(vec, dtype=float)

    def compose(self, other: "Similarity2") -> "Similarity2":
        t = self.matrix() @ other.translation + self.translation
        return Similarity2(self.rotation + other.rotation, self.scale * other.scale, t[0], t[1])

    def inverse(self) -> "Similarity2":
        inv = Similarity2(-self.rotation, 1.0 / self.scale, 0.0, 0.0)
        t = -inv.matrix() @ self.translation
        return Similarity2(-self.rotation, 1.0 / self.scale, t[0], t[1])

    @staticmethod
    def from_rigid(r: RigidTransform2) -> "Similarity2":
        return Similarity2(r.rotation, 1.0, r.tx, r.ty)


def conjugate_rigid(a: RigidTransform2, x: Similarity2) -> RigidTransform2:
    """Express a screen-space rigid transform in the frame reached through x.

    Returns the rigid transform b with x . b == a . x.  Conjugation by a
    similarity preserves the rotation angle, so b stays rigid.
    """
    b = x.inverse().compose(Similarity2.from_rigid(a)).compose(x)
    return RigidTransform2(b.rotation, b.tx, b.ty)


# ---------------------------------------------------------------------------
# polyline basics


def as_polyline(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise GeometryError("polyline needs at least two (x, y) points")
    if not np.isfinite(pts).all():
        raise GeometryError("polyline has non-finite coordinates")
    return pts


def dedupe_points(points, tol: float = 1e-9) -> np.ndarray:
    """Drop consecutive points closer than tol."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    keep = [0]
    for i in range(1, len(pts)):
        if np.hypot(*(pts[i] - pts[keep[-1]])) > tol:
            keep.append(i)
    return pts[keep]


def ensure_stroke(points, tol: float = 1e-9) -> np.ndarray:
    """Validate raw input points as a usable stroke.

    Strokes with fewer than two distinct points after deduplication are
    rejected before they can enter any matching or creation pipeline.
    """
    pts = dedupe_points(points, tol)
    if len(pts) < 2:
        raise GeometryError("degenerate stroke")
    if not np.isfinite(pts).all():
        raise GeometryError("stroke has non-finite coordinates")
    return pts


def segment_lengths(p) -> np.ndarray:
    pts = as_polyline(p)
    return np.linalg.norm(np.diff(pts, axis=0), axis=1)


def arc_length(p) -> float:
    """Total length of a polyline (sum of its segment lengths)."""
    return float(segment_lengths(p).sum())


def bbox_diagonal(points) -> float:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(np.hypot(*span))


def resample(p, n: int) -> np.ndarray:
    """Resample a polyline to n points uniformly spaced by arc length.

    The first and last output points equal the input endpoints exactly.
    """
    pts = as_polyline(p)
    if n < 2:
        raise GeometryError("resample needs n >= 2")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = float(seg.sum())
    if total <= 0.0:
        raise GeometryError("degenerate curve")
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    targets = np.linspace(0.0, total, n)
    out = np.column_stack((
        np.interp(targets, cum, pts[:, 0]),
        np.interp(targets, cum, pts[:, 1]),
    ))
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def pairwise_dist(s, c, centered: bool = False) -> float:
    """Sum of squared distances between corresponding points.

    With centered=True both point lists are first translated so that their
    centroids sit at the origin, which makes the measure translation
    invariant.
    """
    a = as_polyline(s)
    b = as_polyline(c)
    if len(a) != len(b):
        raise GeometryError("count mismatch")
    if centered:
        a = a - a.mean(axis=0)
        b = b - b.mean(axis=0)
    d = a - b
    return float(np.einsum("ij,ij->", d, d))


def dist_min_reverse(s, c, centered: bool = False) -> float:
    """pairwise_dist minimized over the two stroke orientations."""
    a = as_polyline(s)
    return min(pairwise_dist(a, c, centered), pairwise_dist(a[::-1], c, centered))


# ---------------------------------------------------------------------------
# crossings


@dataclass(frozen=True)
class Crossing:
    """One transversal intersection between two polylines."""

    point: tuple
    param_a: float  # normalized arc-length position along the first polyline
    seg_a: int
    t_a: float
    seg_b: int
    t_b: float


def crossings(a, b) -> list[Crossing]:
    """All crossings between two polylines, deduplicated.

    An intersection that falls on a shared vertex of consecutive segments is
    reported once.  A collinear overlap is collapsed to a single crossing at
    the middle of the overlapped span.
    """
    pa = as_polyline(a)
    pb = as_polyline(b)
    scale = 1.0 + max(bbox_diagonal(pa), bbox_diagonal(pb))
    tol = 1e-9 * scale

    seg_a = np.diff(pa, axis=0)
    seg_b = np.diff(pb, axis=0)
    len_a = np.linalg.norm(seg_a, axis=1)
    cum_a = np.concatenate(([0.0], np.cumsum(len_a)))
    total_a = max(cum_a[-1], 1e-300)

    points: list[tuple[float, int, float, int, float, tuple]] = []
    overlaps: list[tuple[float, float]] = []  # spans in arc length along a

    for i in range(len(seg_a)):
        p, r = pa[i], seg_a[i]
        for j in range(len(seg_b)):
            q, s = pb[j], seg_b[j]
            denom = r[0] * s[1] - r[1] * s[0]
            qp = q - p
            if abs(denom) > tol * tol:
                t = (qp[0] * s[1] - qp[1] * s[0]) / denom
                u = (qp[0] * r[1] - qp[1] * r[0]) / denom
                eps = 1e-9
                if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
                    t = min(max(t, 0.0), 1.0)
                    u = min(max(u, 0.0), 1.0)
                    xy = p + t * r
                    param = (cum_a[i] + t * len_a[i]) / total_a
                    points.append((param, i, t, j, u, (float(xy[0]), float(xy[1]))))
            else:
                # parallel; collinear only if q sits on the line through p
                if abs(qp[0] * r[1] - qp[1] * r[0]) > tol * scale:
                    continue
                rr = float(r @ r)
                if rr <= tol * tol:
                    continue
                t0 = float(qp @ r) / rr
                t1 = float((qp + s) @ r) / rr
                lo, hi = min(t0, t1), max(t0, t1)
                lo = max(lo, 0.0)
                hi = min(hi, 1.0)
                if hi < lo:
                    continue
                a_lo = cum_a[i] + lo * len_a[i]
                a_hi = cum_a[i] + hi * len_a[i]
                if a_hi - a_lo <= tol:
                    xy = p + lo * r
                    points.append((a_lo / total_a, i, lo, j, min(max(t0, 0.0), 1.0),
                                   (float(xy[0]), float(xy[1]))))
                else:
                    overlaps.append((a_lo, a_hi))

    # merge overlap spans, one crossing per merged run
    merged: list[list[float]] = []
    for lo, hi in sorted(overlaps):
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    result: list[Crossing] = []
    accepted: list[tuple] = []

    def near_accepted(xy) -> bool:
        return any(math.hypot(xy[0] - q[0], xy[1] - q[1]) <= tol for q in accepted)

    def inside_overlap(arc: float) -> bool:
        return any(lo - tol <= arc <= hi + tol for lo, hi in merged)

    for lo, hi in merged:
        mid = 0.5 * (lo + hi)
        i = int(np.searchsorted(cum_a, mid, side="right")) - 1
        i = min(max(i, 0), len(seg_a) - 1)
        t = (mid - cum_a[i]) / max(len_a[i], 1e-300)
        xy = pa[i] + t * seg_a[i]
        xy = (float(xy[0]), float(xy[1]))
        accepted.append(xy)
        result.append(Crossing(xy, mid / total_a, i, float(t), 0, 0.0))

    for param, i, t, j, u, xy in sorted(points):
        if inside_overlap(param * total_a) or near_accepted(xy):
            continue
        accepted.append(xy)
        result.append(Crossing(xy, float(param), i, float(t), j, float(u)))

    result.sort(key=lambda c: c.param_a)
    return result


def count_crossings(a, b) -> int:
    """Number of transversal crossings between two polylines."""
    return len(crossings(a, b))


# ---------------------------------------------------------------------------
# rigid registration


def best_fit_rigid(source, target) -> RigidTransform2:
    """Least-squares rigid transform taking source points onto target points.

    The rotation is the polar factor of the centered cross-covariance
    (closed form in 2D) and the translation aligns the centroids.  For
    noiseless rigidly related inputs the planted transform is recovered
    exactly.
    """
    s = as_polyline(source)
    t = as_polyline(target)
    if len(s) != len(t):
        raise GeometryError("count mismatch")
    sc = s.mean(axis=0)
    tc = t.mean(axis=0)
    sh = s - sc
    th = t - tc
    if float(np.abs(sh).max()) < 1e-9:
        raise GeometryError("rank deficient")
    h00 = float(th[:, 0] @ sh[:, 0])
    h01 = float(th[:, 0] @ sh[:, 1])
    h10 = float(th[:, 1] @ sh[:, 0])
    h11 = float(th[:, 1] @ sh[:, 1])
    angle = math.atan2(h10 - h01, h00 + h11)
    rot = RigidTransform2(angle)
    trans = tc - rot.matrix() @ sc
    return RigidTransform2(angle, trans[0], trans[1])


def similarity_scale(source, target) -> float:
    """Uniform scale from the ratio of RMS centered radii (target / source)."""
    s = as_polyline(source)
    t = as_polyline(target)
    if len(s) != len(t):
        raise GeometryError("count mismatch")
    rs = float(np.sqrt(((s - s.mean(axis=0)) ** 2).sum(axis=1).mean()))
    rt = float(np.sqrt(((t - t.mean(axis=0)) ** 2).sum(axis=1).mean()))
    if rs < 1e-12:
        raise GeometryError("rank deficient")
    return rt / rs


# ---------------------------------------------------------------------------
# corner detection and segmentation


def _is_closed(pts: np.ndarray) -> bool:
    return float(np.hypot(*(pts[0] - pts[-1]))) <= 1e-9 * (1.0 + bbox_diagonal(pts))


def _runs(flags: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True, as half-open (start, stop) index pairs."""
    runs = []
    start = None
    for i, f in enumerate(flags):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(flags)))
    return runs


def _dense_corners(dense: np.ndarray, window: int, ratio: float) -> tuple[list[int], bool]:
    closed = _is_closed(dense)
    if closed:
        ring = dense[:-1]
        m = len(ring)
        if m <= 2 * window:
            return [], True
        idx = np.arange(m)
        straw = np.linalg.norm(ring[(idx + window) % m] - ring[(idx - window) % m], axis=1)
        threshold = ratio * float(np.median(straw))
        below = straw < threshold
        if not below.any() or below.all():
            return [], True
        # rotate so the scan starts outside a run, then undo the rotation
        start = int(np.argmin(below))
        rolled = np.roll(below, -start)
        corners = []
        for lo, hi in _runs(rolled):
            run = (np.arange(lo, hi) + start) % m
            corners.append(int(run[np.argmin(straw[run])]))
        return sorted(corners), True

    n = len(dense)
    if n <= 2 * window:
        return [], False
    interior = np.arange(window, n - window)
    straw = np.linalg.norm(dense[interior + window] - dense[interior - window], axis=1)
    threshold = ratio * float(np.median(straw))
    below = straw < threshold
    corners = []
    for lo, hi in _runs(below):
        run = np.arange(lo, hi)
        corners.append(int(interior[run[np.argmin(straw[run])]]))
    return sorted(corners), False


def detect_corners(p, samples: int = 64, window: int = 3, ratio: float = 0.95) -> list[int]:
    """ShortStraw corner indices on a dense resampling of the curve.

    The curve is resampled to `samples` points and each point gets a straw,
    the chord length across +-window neighbours.  Local minima below
    ratio * median mark corners.  Closed curves are scanned cyclically so a
    corner at the seam is still found; open curves report interior indices
    only.  Straight lines and circles produce no corners.
    """
    dense = resample(as_polyline(p), samples)
    corners, _ = _dense_corners(dense, window, ratio)
    return corners


def split_at_corners(p, samples: int = 64, window: int = 3,
                     ratio: float = 0.95) -> list[np.ndarray]:
    """Split a curve into corner-delimited pieces of its dense resampling.

    Open curves with k corners yield k + 1 pieces.  Closed curves are split
    cyclically, so k corners yield k pieces and a cornerless closed curve
    stays whole.
    """
    dense = resample(as_polyline(p), samples)
    corners, closed = _dense_corners(dense, window, ratio)
    if closed:
        if not corners:
            return [dense.copy()]
        ring = dense[:-1]
        pieces = []
        for k in range(len(corners)):
            a = corners[k]
            b = corners[(k + 1) % len(corners)]
            if k < len(corners) - 1:
                pieces.append(ring[a:b + 1].copy())
            else:
                pieces.append(np.vstack((ring[a:], ring[:b + 1])))
        return pieces
    bounds = [0] + corners + [len(dense) - 1]
    return [dense[bounds[i]:bounds[i + 1] + 1].copy() for i in range(len(bounds) - 1)]


# ---------------------------------------------------------------------------
# projection and smoothing


def project_to_polyline(q, p) -> tuple[np.ndarray, float]:
    """Closest point on any segment of p, plus its normalized arc-length parameter.

    Ties between equally close segments resolve to the smaller parameter.
    """
    pts = as_polyline(p)
    point = np.asarray(q, dtype=float)
    a = pts[:-1]
    d = np.diff(pts, axis=0)
    len2 = np.einsum("ij,ij->i", d, d)
    t = np.einsum("ij,ij->i", point - a, d) / np.maximum(len2, 1e-300)
    t = np.clip(t, 0.0, 1.0)
    t[len2 == 0.0] = 0.0
    feet = a + t[:, None] * d
    dist2 = np.einsum("ij,ij->i", feet - point, feet - point)
    i = int(np.argmin(dist2))  # first minimum wins, hence the lowest parameter
    seg = np.sqrt(len2)
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    total = max(cum[-1], 1e-300)
    return feet[i].copy(), float((cum[i] + t[i] * seg[i]) / total)


def smooth(p, iterations: int = 1) -> np.ndarray:
    """Corner-cutting smoothing that preserves the endpoints exactly."""
    pts = as_polyline(p).copy()
    for _ in range(max(0, int(iterations))):
        if len(pts) < 3:
            break
        a = pts[:-1]
        b = pts[1:]
        cut = np.empty((2 * len(a), 2))
        cut[0::2] = 0.75 * a + 0.25 * b
        cut[1::2] = 0.25 * a + 0.75 * b
        pts = np.vstack((pts[:1], cut, pts[-1:]))
    return pts
