"""Independent reference implementations used as test oracles."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from hisim.geometry import Polygon
from hisim.synthetic import random_convex, random_star


def inside(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Crossing-number test, written without reference to the package code."""
    x, y = points[:, 0][:, None], points[:, 1][:, None]
    x1, y1 = ring[:, 0][None, :], ring[:, 1][None, :]
    x2, y2 = np.roll(ring[:, 0], -1)[None, :], np.roll(ring[:, 1], -1)[None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    return np.sum(straddle & (x < x_cross), axis=1) % 2 == 1


def monte_carlo_intersection(a: Polygon, b: Polygon, n: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Estimate of |A ∩ B| and its standard error from uniform points in the joint box."""
    lo = np.minimum(a.vertices.min(axis=0), b.vertices.min(axis=0))
    hi = np.maximum(a.vertices.max(axis=0), b.vertices.max(axis=0))
    rng = np.random.default_rng(seed)
    box = float(np.prod(hi - lo))
    hits = 0
    chunk = 50_000
    for start in range(0, n, chunk):
        pts = lo + rng.random((min(chunk, n - start), 2)) * (hi - lo)
        hits += int(np.count_nonzero(inside(pts, a.vertices) & inside(pts, b.vertices)))
    frac = hits / n
    return frac * box, box * np.sqrt(frac * (1 - frac) / n)


def shoelace(pts) -> float:
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def convex_pair(rng, overlap: bool = True):
    a = Polygon(random_convex(rng, int(rng.integers(3, 12))))
    off = rng.uniform(-0.8, 0.8, 2) if overlap else rng.uniform(-3, 3, 2)
    b = Polygon(random_convex(rng, int(rng.integers(3, 12)), center=off))
    return a, b


def star_pair(rng):
    a = Polygon(random_star(rng, int(rng.integers(5, 14))))
    b = Polygon(random_star(rng, int(rng.integers(5, 14)), center=rng.uniform(-0.6, 0.6, 2)))
    return a, b


def random_polygon(rng) -> Polygon:
    if rng.random() < 0.5:
        return Polygon(random_convex(rng, int(rng.integers(3, 12))) * rng.uniform(0.2, 5))
    return Polygon(random_star(rng, int(rng.integers(4, 14))) * rng.uniform(0.2, 5))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def criterion(number: int, title: str):
    """Record the outcome of an acceptance test for the end-of-run summary."""
    import functools

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                ACCEPTANCE[number] = (title, False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
                raise
            ACCEPTANCE[number] = (title, True, detail)

        return run

    return wrap
