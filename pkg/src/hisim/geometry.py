"""Planar polygon kernel.

Polygons are simple rings without holes, stored counter-clockwise with the
closing vertex implicit.  Everything here is a pure function of immutable
values.
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple

import numpy as np

__all__ = [
    "Point2",
    "Mbr",
    "Polygon",
    "InvalidGeometryError",
    "DegenerateGeometryError",
    "area",
    "perimeter",
    "centroid",
    "center_at_origin",
    "translate",
    "mbr",
    "mbr_intersects",
    "intersection_area",
    "union_area",
    "resample_boundary",
    "complexity_count",
    "is_convex",
]

COLLINEAR_TOL = 1e-12


class InvalidGeometryError(ValueError):
    """Raised when a ring cannot form a valid simple polygon."""


class DegenerateGeometryError(ArithmeticError):
    """Raised when a computation hits a numerically pathological configuration."""


class Point2(NamedTuple):
    x: float
    y: float


class Mbr(NamedTuple):
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point2:
        return Point2(0.5 * (self.min_x + self.max_x), 0.5 * (self.min_y + self.max_y))

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[...,0]


def _signed_area(pts: np.ndarray) -> float:
    q = pts - pts[0]
    nxt = np.roll(q, -1, axis=0)
    return 0.5 * float(np.sum(q[:, 0] * nxt[:, 1] - q[:, 1] * nxt[:, 0]))


def _drop_repeats(pts: np.ndarray) -> np.ndarray:
    if len(pts) < 2:
        return pts
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    # drop closing copies of vertex 0
    while len(pts) > 1 and np.array_equal(pts[-1], pts[0]):
        pts = pts[:-1]
    return pts


def _segments_touch(p1, p2, q1, q2) -> np.ndarray:
    """Closed segment intersection test, broadcast over leading axes."""
    d = p2 - p1
    e = q2 - q1
    o1 = _cross(d, q1 - p1)
    o2 = _cross(d, q2 - p1)
    o3 = _cross(e, p1 - q1)
    o4 = _cross(e, p2 - q1)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)

    def on_seg(a, b, c, o):
        # c collinear with a-b and inside its bounding box
        return (
            (o == 0)
            & (np.minimum(a[..., 0], b[..., 0]) <= c[..., 0])
            & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
            & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1])
            & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
        )

    return (
        proper
        | on_seg(p1, p2, q1, o1)
        | on_seg(p1, p2, q2, o2)
        | on_seg(q1, q2, p1, o3)
        | on_seg(q1, q2, p2, o4)
    )


def _is_simple(pts: np.ndarray) -> bool:
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    i, j = np.triu_indices(n, k=1)
    adjacent = (j == i + 1) | ((i == 0) & (j == n - 1))
    hits = _segments_touch(a[i], b[i], a[j], b[j])
    if np.any(hits & ~adjacent):
        return False
    # adjacent edges may only share their common vertex, never fold back
    d_prev = pts - np.roll(pts, 1, axis=0)
    d_next = b - pts
    fold = (_cross(d_prev, d_next) == 0) & (np.sum(d_prev * d_next, axis=1) < 0)
    return not fold.any()


class Polygon:
    """Simple polygon with an implicitly closed, counter-clockwise exterior ring.

    ``vertices`` may repeat the first point at the end (WKT style); the
    duplicate is dropped.  Clockwise input is reversed in place of vertex 0 so
    the starting vertex is preserved.
    """

    __slots__ = ("vertices", "id", "__dict__")

    def __init__(self, vertices, id=None, *, validate: bool = True):
        pts = np.array(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidGeometryError("vertices must be a sequence of (x, y) pairs")
        pts = _drop_repeats(pts)
        if validate:
            if len(pts) < 3:
                raise InvalidGeometryError(
                    f"polygon needs at least 3 distinct vertices, got {len(pts)}"
                )
            if not np.all(np.isfinite(pts)):
                raise InvalidGeometryError("vertex coordinates must be finite")
        sa = _signed_area(pts)
        if validate:
            if sa == 0.0:
                raise InvalidGeometryError("polygon has zero area")
            if not _is_simple(pts):
                raise InvalidGeometryError("ring is self-intersecting")
        if sa < 0:
            pts = np.concatenate([pts[:1], pts[:0:-1]])
        pts.setflags(write=False)
        self.vertices = pts
        self.id = id

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon(id={self.id!r}, n={len(self.vertices)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.vertices, other.vertices)

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def area(self) -> float:
        return abs(_signed_area(self.vertices))

    @cached_property
    def perimeter(self) -> float:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    @cached_property
    def mbr(self) -> Mbr:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return Mbr(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    @cached_property
    def centroid(self) -> Point2:
        v0 = self.vertices[0]
        q = self.vertices - v0
        nxt = np.roll(q, -1, axis=0)
        cr = q[:, 0] * nxt[:, 1] - q[:, 1] * nxt[:, 0]
        a6 = 3.0 * float(np.sum(cr))
        cx = float(np.sum((q[:, 0] + nxt[:, 0]) * cr)) / a6
        cy = float(np.sum((q[:, 1] + nxt[:, 1]) * cr)) / a6
        return Point2(cx + float(v0[0]), cy + float(v0[1]))

    @cached_property
    def is_convex(self) -> bool:
        v = self.vertices
        d_prev = v - np.roll(v, 1, axis=0)
        d_next = np.roll(v, -1, axis=0) - v
        turn = _cross(d_prev, d_next)
        scale = np.hypot(*d_prev.T) * np.hypot(*d_next.T)
        return bool(np.all(turn >= -COLLINEAR_TOL * scale))

    @cached_property
    def _order_key(self) -> tuple:
        return (len(self.vertices), self.vertices.tobytes())


def area(p: Polygon) -> float:
    return p.area


def perimeter(p: Polygon) -> float:
    return p.perimeter


def centroid(p: Polygon) -> Point2:
    """Area-weighted centroid of the polygon interior."""
    return p.centroid


def mbr(p: Polygon) -> Mbr:
    return p.mbr


def is_convex(p: Polygon) -> bool:
    return p.is_convex


def translate(p: Polygon, dx: float, dy: float) -> Polygon:
    return Polygon(p.vertices + np.array([dx, dy]), p.id, validate=False)


def center_at_origin(p: Polygon) -> Polygon:
    """Translate ``p`` so that its centroid sits at the origin."""
    cx, cy = p.centroid
    if cx == 0.0 and cy == 0.0:
        return p
    return translate(p, -cx, -cy)


def mbr_intersects(a: Mbr, b: Mbr) -> bool:
    """Closed-interval rectangle overlap; touching boundaries count."""
    return (
        a.min_x <= b.max_x
        and b.min_x <= a.max_x
        and a.min_y <= b.max_y
        and b.min_y <= a.max_y
    )


def complexity_count(p: Polygon) -> int:
    """Vertex count after dropping vertices collinear with their neighbours."""
    v = p.vertices
    d_prev = v - np.roll(v, 1, axis=0)
    d_next = np.roll(v, -1, axis=0) - v
    turn = np.abs(_cross(d_prev, d_next))
    scale = np.hypot(*d_prev.T) * np.hypot(*d_next.T)
    return int(np.count_nonzero(turn > COLLINEAR_TOL * scale))


def resample_boundary(p: Polygon, m: int) -> np.ndarray:
    """Return ``m`` points evenly spaced by arc length, starting at vertex 0.

    The result is an ``(m, 2)`` array.
    """
    if m < 1:
        raise ValueError("m must be positive")
    v = p.vertices
    closed = np.vstack([v, v[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    s = np.arange(m) * (total / m)
    k = np.searchsorted(cum, s, side="right") - 1
    k = np.clip(k, 0, len(seg) - 1)
    frac = (s - cum[k]) / seg[k]
    return closed[k] + frac[:, None] * (closed[k + 1] - closed[k])


# ---------------------------------------------------------------------------
# intersection area
# ---------------------------------------------------------------------------


def _clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: clip ``subject`` by every half-plane of CCW ``clip``."""
    out = [tuple(pt) for pt in subject]
    m = len(clip)
    for k in range(m):
        if not out:
            break
        cx1, cy1 = clip[k]
        cx2, cy2 = clip[(k + 1) % m]
        ex, ey = cx2 - cx1, cy2 - cy1
        src = out
        out = []
        sx, sy = src[-1]
        s_in = ex * (sy - cy1) - ey * (sx - cx1)
        for px, py in src:
            p_in = ex * (py - cy1) - ey * (px - cx1)
            if p_in >= 0:
                if s_in < 0:
                    t = s_in / (s_in - p_in)
                    out.append((sx + t * (px - sx), sy + t * (py - sy)))
                out.append((px, py))
            elif s_in >= 0:
                t = s_in / (s_in - p_in)
                out.append((sx + t * (px - sx), sy + t * (py - sy)))
            sx, sy, s_in = px, py, p_in
    if len(out) < 3:
        return np.empty((0, 2))
    return np.asarray(out)


def _points_in_ring(pts: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Even-odd crossing test of points (k, 2) against a ring (m, 2)."""
    x1 = ring[:, 0][None, :]
    y1 = ring[:, 1][None, :]
    nxt = np.roll(ring, -1, axis=0)
    x2 = nxt[:, 0][None, :]
    y2 = nxt[:, 1][None, :]
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    straddle = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    hits = straddle & (px < xint)
    return (np.count_nonzero(hits, axis=1) % 2) == 1


def _boundary_pieces(P: np.ndarray, Q: np.ndarray, tol: float, keep_shared: bool) -> float:
    """Sum of cross(p0, p1) over the pieces of P's boundary lying inside Q.

    P's edges are split at every contact with Q's boundary.  A piece counts
    when its midpoint is strictly inside Q, or, with ``keep_shared``, when it
    runs along a Q edge in the same direction.
    """
    n = len(P)
    A = P
    d = np.roll(P, -1, axis=0) - P
    C = Q
    e = np.roll(Q, -1, axis=0) - Q
    dlen = np.hypot(d[:, 0], d[:, 1])
    elen = np.hypot(e[:, 0], e[:, 1])

    diff = C[None, :, :] - A[:, None, :]
    denom = _cross(d[:, None, :], e[None, :, :])
    par_tol = COLLINEAR_TOL * dlen[:, None] * elen[None, :]
    crossing = np.abs(denom) > par_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(diff, e[None, :, :]) / denom
        u = _cross(diff, d[:, None, :]) / denom
    eps = 1e-12
    hit = crossing & (t > -eps) & (t < 1 + eps) & (u > -eps) & (u < 1 + eps)
    ei, _ = np.nonzero(hit)
    splits_e = [ei]
    splits_t = [t[hit]]

    # collinear overlaps: split at the projections of the other edge's ends
    off_line = np.abs(_cross(diff, d[:, None, :])) / dlen[:, None]
    colin = ~crossing & (off_line <= tol)
    if colin.any():
        ci, cj = np.nonzero(colin)
        dd = d[ci]
        dl2 = dlen[ci] ** 2
        t0 = np.sum((C[cj] - A[ci]) * dd, axis=1) / dl2
        t1 = np.sum((C[cj] + e[cj] - A[ci]) * dd, axis=1) / dl2
        splits_e += [ci, ci]
        splits_t += [t0, t1]

    idx = np.arange(n)
    splits_e += [idx, idx]
    splits_t += [np.zeros(n), np.ones(n)]
    se = np.concatenate(splits_e)
    st = np.clip(np.concatenate(splits_t), 0.0, 1.0)
    order = np.lexsort((st, se))
    se = se[order]
    st = st[order]

    same_edge = se[1:] == se[:-1]
    gap = st[1:] - st[:-1]
    keep = same_edge & (gap > 1e-12)
    pe = se[:-1][keep]
    t0 = st[:-1][keep]
    t1 = st[1:][keep]
    p0 = A[pe] + t0[:, None] * d[pe]
    p1 = A[pe] + t1[:, None] * d[pe]
    mid = 0.5 * (p0 + p1)

    # distance from each midpoint to each Q edge
    w = mid[:, None, :] - C[None, :, :]
    el2 = np.maximum(elen**2, 1e-300)
    proj = np.clip(np.sum(w * e[None, :, :], axis=2) / el2[None, :], 0.0, 1.0)
    near = C[None, :, :] + proj[..., None] * e[None, :, :]
    dist = np.hypot(*(mid[:, None, :] - near).transpose(2, 0, 1))
    piece_dir = d[pe]
    parallel = np.abs(_cross(piece_dir[:, None, :], e[None, :, :])) <= (
        1e-9 * dlen[pe][:, None] * elen[None, :]
    )
    shared = (dist <= tol) & parallel
    on_boundary = shared.any(axis=1)
    same_dir = np.any(
        shared & (np.sum(piece_dir[:, None, :] * e[None, :, :], axis=2) > 0), axis=1
    )

    inside = np.zeros(len(mid), dtype=bool)
    free = ~on_boundary
    if free.any():
        inside[free] = _points_in_ring(mid[free], Q)
    take = inside | (on_boundary & same_dir) if keep_shared else inside
    return float(np.sum(_cross(p0[take], p1[take])))


def _general_area(a: Polygon, b: Polygon) -> float:
    # work relative to a common origin to keep cross products well scaled
    box = a.mbr
    origin = np.array([box.min_x, box.min_y])
    P = a.vertices - origin
    Q = b.vertices - origin
    scale = max(a.mbr.diagonal, b.mbr.diagonal)
    tol = 1e-10 * scale
    twice = _boundary_pieces(P, Q, tol, keep_shared=True) + _boundary_pieces(
        Q, P, tol, keep_shared=False
    )
    return 0.5 * twice


def intersection_area(a: Polygon, b: Polygon) -> float:
    """Area of the intersection of two simple polygons.

    Convex pairs go through half-plane clipping; everything else through a
    boundary integral over the split edges of both rings.  The result is
    bitwise symmetric in its arguments.
    """
    if not mbr_intersects(a.mbr, b.mbr):
        return 0.0
    if a is b or np.array_equal(a.vertices, b.vertices):
        return a.area
    if b._order_key < a._order_key:
        a, b = b, a
    if a.is_convex and b.is_convex:
        ring = _clip_convex(a.vertices, b.vertices)
        value = abs(_signed_area(ring)) if len(ring) else 0.0
    else:
        value = _general_area(a, b)
    bound = min(a.area, b.area)
    slack = 1e-9 * max(a.area, b.area)
    if not (-slack <= value <= bound + slack):
        raise DegenerateGeometryError(
            f"clipping produced area {value!r} outside [0, {bound!r}]"
        )
    return min(max(value, 0.0), bound)


def union_area(a: Polygon, b: Polygon) -> float:
    return a.area + b.area - intersection_area(a, b)
