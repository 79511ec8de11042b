"""Pairwise polygon similarity metrics and the cluster similarity index.

Every pairwise function expects polygons that were already moved to the
origin with :func:`hisim.geometry.center_at_origin`.  Per-polygon quantities
such as area, perimeter and Fourier magnitudes are gathered once in a
:class:`ShapeProfile` so that scoring many pairs only pays for the clipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .geometry import (
    DegenerateGeometryError,
    Polygon,
    center_at_origin,
    complexity_count,
    intersection_area,
    resample_boundary,
)

FOURIER_POINTS = 64
FOURIER_TERMS = 10
MAX_EXACT_OBJECTS = 200

METRIC_NAMES = (
    "jaccard",
    "area",
    "curvature",
    "fourier",
    "aspect_ratio",
    "perimeter",
    "bbox_distance",
    "circularity",
)


@dataclass(frozen=True)
class MetricWeights:
    """Nonnegative weights of the eight metrics; must sum to one."""

    w_jaccard: float = 0.125
    w_area: float = 0.125
    w_curv: float = 0.125
    w_fd: float = 0.125
    w_ar: float = 0.125
    w_perim: float = 0.125
    w_bb: float = 0.125
    w_circ: float = 0.125

    def __post_init__(self):
        vals = self.as_tuple()
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ValueError(f"weights must be finite and nonnegative: {vals}")
        if abs(math.fsum(vals) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(vals)!r}")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "MetricWeights":
        if len(values) != 8:
            raise ValueError(f"expected 8 weights, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def one_hot(cls, name: str) -> "MetricWeights":
        vals = [0.0] * 8
        vals[METRIC_NAMES.index(name)] = 1.0
        return cls(*vals)


EQUAL_WEIGHTS = MetricWeights()


@dataclass(frozen=True)
class PairSimilarity:
    jaccard: float
    area: float
    curvature: float
    fourier: float
    aspect_ratio: float
    perimeter: float
    bbox_distance: float
    circularity: float
    combined: float

    def metrics(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in METRIC_NAMES)


def fourier_descriptor(
    p: Polygon, points: int = FOURIER_POINTS, terms: int = FOURIER_TERMS
) -> np.ndarray:
    """Magnitudes of DFT coefficients 1..terms of the resampled boundary.

    The boundary is resampled to ``points`` samples treated as complex
    numbers ``x + iy``.  Coefficient 0 (position) is dropped and the rest are
    divided by the magnitude of coefficient 1, which removes scale.
    """
    z = resample_boundary(p, points) @ np.array([1.0, 1.0j])
    mags = np.abs(np.fft.fft(z))[1 : terms + 1]
    if mags[0] < 1e-12:
        raise DegenerateGeometryError("first Fourier coefficient vanishes")
    return mags / mags[0]


def circularity(p: Polygon) -> float:
    return 4.0 * math.pi * p.area / p.perimeter**2


def aspect_ratio(p: Polygon) -> float:
    box = p.mbr
    return box.width / max(box.height, 1e-12)


@dataclass(frozen=True, eq=False)
class ShapeProfile:
    """Per-polygon inputs of every metric."""

    polygon: Polygon
    area: float
    perimeter: float
    complexity: int
    descriptor: np.ndarray
    aspect_ratio: float
    bbox_center: tuple[float, float]
    circularity: float

    @classmethod
    def of(
        cls, p: Polygon, points: int = FOURIER_POINTS, terms: int = FOURIER_TERMS
    ) -> "ShapeProfile":
        return cls(
            polygon=p,
            area=p.area,
            perimeter=p.perimeter,
            complexity=complexity_count(p),
            descriptor=fourier_descriptor(p, points, terms),
            aspect_ratio=aspect_ratio(p),
            bbox_center=tuple(p.mbr.center),
            circularity=circularity(p),
        )


def _inverse_gap(x: float) -> float:
    return 1.0 / (1.0 + x)


def jaccard(a: Polygon, b: Polygon) -> float:
    inter = intersection_area(a, b)
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def area_similarity(a: Polygon, b: Polygon) -> float:
    return 2.0 * intersection_area(a, b) / (a.area + b.area)


def _curvature(na: int, nb: int) -> float:
    return math.exp(-abs(na - nb) / max(na, nb))


def curvature_similarity(a: Polygon, b: Polygon) -> float:
    return _curvature(complexity_count(a), complexity_count(b))


def fourier_similarity(
    a: Polygon, b: Polygon, points: int = FOURIER_POINTS, terms: int = FOURIER_TERMS
) -> float:
    fa = fourier_descriptor(a, points, terms)
    fb = fourier_descriptor(b, points, terms)
    return _inverse_gap(float(np.linalg.norm(fa - fb)))


def aspect_ratio_similarity(a: Polygon, b: Polygon) -> float:
    return _inverse_gap(abs(aspect_ratio(a) - aspect_ratio(b)))


def perimeter_similarity(a: Polygon, b: Polygon) -> float:
    return _inverse_gap(abs(a.perimeter - b.perimeter))


def bbox_distance_similarity(a: Polygon, b: Polygon) -> float:
    ca, cb = a.mbr.center, b.mbr.center
    return _inverse_gap(math.hypot(ca.x - cb.x, ca.y - cb.y))


def circularity_similarity(a: Polygon, b: Polygon) -> float:
    return _inverse_gap(abs(circularity(a) - circularity(b)))


def profile_similarity(
    pa: ShapeProfile, pb: ShapeProfile, weights: MetricWeights = EQUAL_WEIGHTS
) -> PairSimilarity:
    """All eight metrics and their weighted sum from two cached profiles."""
    inter = intersection_area(pa.polygon, pb.polygon)
    area_sum = pa.area + pb.area
    union = area_sum - inter
    ca, cb = pa.bbox_center, pb.bbox_center
    scores = (
        inter / union if union > 0 else 0.0,
        2.0 * inter / area_sum,
        _curvature(pa.complexity, pb.complexity),
        _inverse_gap(float(np.linalg.norm(pa.descriptor - pb.descriptor))),
        _inverse_gap(abs(pa.aspect_ratio - pb.aspect_ratio)),
        _inverse_gap(abs(pa.perimeter - pb.perimeter)),
        _inverse_gap(math.hypot(ca[0] - cb[0], ca[1] - cb[1])),
        _inverse_gap(abs(pa.circularity - pb.circularity)),
    )
    combined = math.fsum(w * m for w, m in zip(weights.as_tuple(), scores))
    return PairSimilarity(*scores, combined=min(max(combined, 0.0), 1.0))


def combined_similarity(
    a: Polygon,
    b: Polygon,
    weights: MetricWeights = EQUAL_WEIGHTS,
    points: int = FOURIER_POINTS,
    terms: int = FOURIER_TERMS,
) -> PairSimilarity:
    return profile_similarity(
        ShapeProfile.of(a, points, terms), ShapeProfile.of(b, points, terms), weights
    )


def pair_similarity(
    a: Polygon,
    b: Polygon,
    weights: MetricWeights = EQUAL_WEIGHTS,
    points: int = FOURIER_POINTS,
    terms: int = FOURIER_TERMS,
) -> PairSimilarity:
    """Like :func:`combined_similarity` but for raw polygons: both are centered first."""
    return combined_similarity(center_at_origin(a), center_at_origin(b), weights, points, terms)


def pair_plan(
    n: int, max_exact: int = MAX_EXACT_OBJECTS, seed: int = 0
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Index pairs (i < j) to average for a cluster of ``n`` objects.

    Up to ``max_exact`` objects every unordered pair is used.  Beyond that a
    seeded uniform subsample of ``max_exact * (max_exact - 1) / 2`` pairs is
    drawn; the third return value flags this case.
    """
    i, j = np.triu_indices(n, k=1)
    if n <= max_exact:
        return i, j, False
    budget = max_exact * (max_exact - 1) // 2
    pick = np.sort(np.random.default_rng(seed).choice(len(i), size=budget, replace=False))
    return i[pick], j[pick], True


def similarity_index(
    objects: Sequence[ShapeProfile | Polygon],
    weights: MetricWeights = EQUAL_WEIGHTS,
    *,
    max_exact: int = MAX_EXACT_OBJECTS,
    seed: int = 0,
) -> float:
    """Mean combined similarity over the unordered pairs of ``objects``.

    Fewer than two objects give 1.0.  Polygons are profiled on the fly and
    must already be centered.
    """
    profiles = [o if isinstance(o, ShapeProfile) else ShapeProfile.of(o) for o in objects]
    if len(profiles) < 2:
        return 1.0
    ii, jj, _ = pair_plan(len(profiles), max_exact, seed)
    total = math.fsum(
        profile_similarity(profiles[i], profiles[j], weights).combined
        for i, j in zip(ii.tolist(), jj.tolist())
    )
    return total / len(ii)


def mean_of_pairs(scores: Sequence[float]) -> float:
    """Index value from precomputed pair scores."""
    return math.fsum(scores) / len(scores)
