"""Lightweight cluster features for the scheduling classifier.

Each (member, representative) pair yields fifteen raw features.  They are
min-max scaled per geometry pair, averaged per cluster, scaled again across
clusters, and extended with the cluster size to give sixteen values.

Both scalings use ``(value - min) / max * 10000``.  With ``range_normalize``
the denominator becomes ``max - min`` instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cluster import Cluster
from .geometry import Polygon, mbr_intersects
from .spatial_index import GridIndex

N_PAIR_FEATURES = 15
N_CLUSTER_FEATURES = 16
SCALE = 10000.0

PAIR_FEATURE_NAMES = (
    "source_mbr_area",
    "target_mbr_area",
    "source_tiles",
    "target_tiles",
    "source_real_pairs",
    "source_vertices",
    "target_vertices",
    "source_perimeter",
    "target_perimeter",
    "source_total_cooccurrences",
    "source_distinct_cooccurrences",
    "cluster_real_candidates",
    "cluster_overlap_sum",
    "cluster_target_overlaps",
    "cluster_size",
)


class ClusterAssertionError(AssertionError):
    """A cluster member does not touch the representative's MBR."""


@dataclass
class SourceStats:
    """Per-source counters collected while scanning the targets.

    ``total`` counts tile-level encounters with multiplicity, ``distinct``
    the targets sharing at least one tile, ``real`` the MBR-intersecting
    targets.
    """

    total: np.ndarray
    distinct: np.ndarray
    real: np.ndarray

    @classmethod
    def zeros(cls, n_sources: int) -> "SourceStats":
        z = lambda: np.zeros(n_sources, dtype=np.int64)  # noqa: E731
        return cls(z(), z(), z())

    def record(self, source: int, shared_tiles: int, intersects: bool) -> None:
        self.total[source] += shared_tiles
        self.distinct[source] += 1
        if intersects:
            self.real[source] += 1

    def check(self, source: int) -> None:
        if not 0 <= source < len(self.total):
            raise KeyError(f"unknown source id {source}")


def representative_geometry(
    c: Cluster, sources: Sequence[Polygon], targets: Sequence[Polygon]
) -> Polygon:
    """The target that seeded ``c``; verifies it touches every member's MBR."""
    g = targets[c.target]
    for s in c.members:
        if not mbr_intersects(sources[s].mbr, g.mbr):
            raise ClusterAssertionError(
                f"source {s} does not intersect representative of cluster {c.cid}"
            )
    return g


def extract_pair_features(
    s_idx: int,
    c: Cluster,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    stats: SourceStats,
    idx: GridIndex,
) -> np.ndarray:
    stats.check(s_idx)
    s = sources[s_idx]
    g = targets[c.target]
    members = c.members
    touching = sum(1 for m in members if mbr_intersects(sources[m].mbr, g.mbr))
    return np.array(
        [
            s.mbr.area,
            g.mbr.area,
            idx.tile_count(s.mbr),
            idx.tile_count(g.mbr),
            stats.real[s_idx],
            len(s),
            len(g),
            s.perimeter,
            g.perimeter,
            stats.total[s_idx],
            stats.distinct[s_idx],
            touching,
            int(np.sum(stats.real[list(members)])),
            touching,
            len(members),
        ],
        dtype=float,
    )


def cluster_pair_features(
    c: Cluster,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    stats: SourceStats,
    idx: GridIndex,
) -> np.ndarray:
    """Raw features of every (member, representative) pair, members in id order."""
    representative_geometry(c, sources, targets)
    return np.vstack(
        [extract_pair_features(s, c, sources, targets, stats, idx) for s in sorted(c.members)]
    )


def _scale(values, lo, hi, range_normalize: bool):
    values = np.asarray(values, dtype=float)
    denom = np.asarray(hi - lo if range_normalize else hi, dtype=float)
    safe = np.where(denom == 0, 1.0, denom)
    return np.where(denom == 0, 0.0, (values - lo) / safe * SCALE)


def normalize_feature(fv, lo, hi, range_normalize: bool = False):
    """``(fv - lo) / hi * 10000``; 0 when the denominator vanishes."""
    out = _scale(fv, lo, hi, range_normalize)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class MinMaxRegistry:
    """Geometry-level and cluster-level extrema, fitted once then frozen."""

    geo_min: np.ndarray
    geo_max: np.ndarray
    cl_min: np.ndarray = field(default=None)
    cl_max: np.ndarray = field(default=None)
    range_normalize: bool = False

    @classmethod
    def fit(
        cls, pair_blocks: Sequence[np.ndarray], range_normalize: bool = False
    ) -> "MinMaxRegistry":
        """Fit both levels from the raw pair features of a cluster population."""
        stacked = np.vstack(pair_blocks)
        reg = cls(stacked.min(axis=0), stacked.max(axis=0), range_normalize=range_normalize)
        aggregates = np.vstack([reg.aggregate(b) for b in pair_blocks])
        reg.cl_min = aggregates.min(axis=0)
        reg.cl_max = aggregates.max(axis=0)
        return reg

    def normalize_geometry(self, pair_features: np.ndarray) -> np.ndarray:
        return _scale(pair_features, self.geo_min, self.geo_max, self.range_normalize)

    def aggregate(self, pair_features: np.ndarray) -> np.ndarray:
        """Mean normalized pair features plus raw cluster size (16 values)."""
        nf = self.normalize_geometry(pair_features).mean(axis=0)
        return np.append(nf, float(len(pair_features)))

    def cluster_vector(self, pair_features: np.ndarray) -> np.ndarray:
        if self.cl_min is None:
            raise RuntimeError("registry has no cluster-level extrema")
        return _scale(self.aggregate(pair_features), self.cl_min, self.cl_max, self.range_normalize)


def normalize_geometry_feature(fv: float, j: int, reg: MinMaxRegistry) -> float:
    return normalize_feature(fv, reg.geo_min[j], reg.geo_max[j], reg.range_normalize)


def cluster_feature_vector(
    c: Cluster,
    reg: MinMaxRegistry,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    stats: SourceStats,
    idx: GridIndex,
) -> np.ndarray:
    return reg.cluster_vector(cluster_pair_features(c, sources, targets, stats, idx))


def write_feature_csv(path, rows: Iterable[tuple[int, np.ndarray]]) -> None:
    """One line per cluster: id followed by its 16 normalized features."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster_id", *[f"ncf{k}" for k in range(1, N_CLUSTER_FEATURES + 1)]])
        for cid, vec in rows:
            w.writerow([cid, *(repr(float(v)) for v in vec)])
