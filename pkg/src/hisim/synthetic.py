"""Seeded synthetic polygon datasets and random-shape helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Polygon, mbr_intersects

FAMILIES = ("ngon", "rect", "star")


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> np.ndarray:
    ang = phase + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)])


def rectangle(width: float, height: float, center=(0.0, 0.0)) -> np.ndarray:
    cx, cy = center
    w, h = width / 2.0, height / 2.0
    return np.array([(cx - w, cy - h), (cx + w, cy - h), (cx + w, cy + h), (cx - w, cy + h)])


def random_star(
    rng: np.random.Generator, n: int, center=(0.0, 0.0), r_min: float = 0.4, r_max: float = 1.0
) -> np.ndarray:
    """Star-shaped ring: one vertex per angular sector, so it is always simple."""
    ang = (np.arange(n) + rng.uniform(0.1, 0.9, n)) * (2.0 * np.pi / n)
    r = rng.uniform(r_min, r_max, n)
    return np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])


def random_convex(
    rng: np.random.Generator, n: int, center=(0.0, 0.0), radius: float = 1.0
) -> np.ndarray:
    """Convex polygon with ``n`` vertices on a randomly stretched ellipse."""
    ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    # enforce a minimum angular gap so no vertex is collinear with neighbours
    ang = np.sort((ang + np.arange(n) * 1e-3) % (2.0 * np.pi))
    ax = radius * rng.uniform(0.5, 1.0)
    ay = radius * rng.uniform(0.5, 1.0)
    rot = rng.uniform(0.0, np.pi)
    pts = np.column_stack([ax * np.cos(ang), ay * np.sin(ang)])
    c, s = math.cos(rot), math.sin(rot)
    pts = pts @ np.array([[c, s], [-s, c]])
    return pts + np.asarray(center, dtype=float)


def _rotate(pts: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return pts @ np.array([[c, s], [-s, c]])


def base_shape(rng: np.random.Generator, family: str, scale: float) -> np.ndarray:
    if family == "ngon":
        return regular_polygon(int(rng.integers(5, 13)), scale)
    if family == "rect":
        aspect = rng.uniform(1.0, 3.0)
        return rectangle(2.0 * scale * math.sqrt(aspect), 2.0 * scale / math.sqrt(aspect))
    if family == "star":
        k = int(rng.integers(5, 9))
        outer = regular_polygon(k, scale)
        inner = regular_polygon(k, 0.5 * scale, phase=math.pi / k)
        return np.stack([outer, inner], axis=1).reshape(-1, 2)
    raise ValueError(f"unknown shape family {family!r}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of :func:`generate_synthetic`.

    Each target sits in its own cell of a square lattice with ``spacing``
    between cells, surrounded by sources whose MBRs touch it.  A fraction
    ``high_fraction`` of the neighbourhoods hold near-congruent copies of the
    target (radial vertex jitter ``noise``).  The others get a random
    coherence ``c`` in [0, 1]: sources are copies of the target distorted by
    up to ``low_noise`` in vertex radius, scale and rotation, less so for
    larger ``c``, and the member count grows with ``c``.
    """

    n_targets: int = 200
    high_fraction: float = 0.1
    high_members: tuple[int, int] = (5, 8)
    low_members: tuple[int, int] = (1, 4)
    noise: float = 0.005
    low_noise: float = 0.6
    families: tuple[str, ...] = FAMILIES
    scale_range: tuple[float, float] = (0.6, 1.6)
    spacing: float = 10.0


def _radial_jitter(rng, pts, sigma):
    # scaling each vertex along its ray keeps star-shaped rings simple
    if sigma <= 0:
        return pts
    factor = np.clip(1.0 + rng.normal(0.0, sigma, len(pts)), 0.3, None)
    return pts * factor[:, None]


def _place(rng, shape, center, size, g, pid):
    while True:
        offset = rng.uniform(-0.3, 0.3, 2) * size
        candidate = Polygon(shape + center + offset, pid)
        if mbr_intersects(candidate.mbr, g.mbr):
            return candidate


def generate_synthetic(spec: GeneratorSpec, seed: int = 0) -> tuple[list[Polygon], list[Polygon]]:
    """Return ``(sources, targets)`` for the given spec, deterministic per seed."""
    if spec.n_targets <= 0:
        raise ValueError("n_targets must be positive")
    rng = np.random.default_rng(seed)
    side = math.ceil(math.sqrt(spec.n_targets))
    sources: list[Polygon] = []
    targets: list[Polygon] = []
    n_high = round(spec.high_fraction * spec.n_targets)
    is_high = np.zeros(spec.n_targets, dtype=bool)
    is_high[rng.choice(spec.n_targets, size=n_high, replace=False)] = True
    for t in range(spec.n_targets):
        center = np.array([(t % side) * spec.spacing, (t // side) * spec.spacing])
        family = spec.families[int(rng.integers(len(spec.families)))]
        scale = rng.uniform(*spec.scale_range)
        base = _rotate(base_shape(rng, family, scale), rng.uniform(0, 2 * np.pi))
        g = Polygon(base + center, t)
        targets.append(g)
        if is_high[t]:
            lo, hi = spec.high_members
            k = int(rng.integers(lo, hi + 1))
            for _ in range(k):
                shape = _radial_jitter(rng, base, spec.noise)
                sources.append(_place(rng, shape, center, scale, g, len(sources)))
            continue
        c = rng.uniform()
        lo, hi = spec.low_members
        k = lo + int(round(c * (hi - lo)))
        spread = spec.low_noise * (1.0 - c)
        for _ in range(k):
            shape = _radial_jitter(rng, base, spread)
            shape = shape * math.exp(rng.normal(0.0, spread))
            shape = _rotate(shape, rng.normal(0.0, spread * np.pi))
            sources.append(_place(rng, shape, center, scale, g, len(sources)))
    return sources, targets
