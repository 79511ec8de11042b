"""Uniform tile grid over source MBRs for candidate retrieval."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Iterable, Sequence

import numpy as np

from .geometry import Mbr, Polygon


def define_granularity(sources: Sequence[Polygon]) -> tuple[float, float]:
    """Tiles per unit along x and y: the reciprocal of the mean MBR extent."""
    if len(sources) == 0:
        raise ValueError("cannot size an index over an empty source set")
    widths = np.array([s.mbr.width for s in sources])
    heights = np.array([s.mbr.height for s in sources])

    def recip(mean: float) -> float:
        if not math.isfinite(mean) or mean <= 0:
            return 1.0
        value = 1.0 / mean
        return value if math.isfinite(value) else 1.0

    return recip(float(widths.mean())), recip(float(heights.mean()))


class GridIndex:
    """Sparse map from integer tile coordinates to source keys.

    A box covers tiles ``floor(min * delta) .. ceil(max * delta)`` inclusive
    on each axis, so it may claim one extra row/column; retrieval only needs
    to be a superset of the true MBR matches.
    """

    def __init__(self, delta_x: float, delta_y: float):
        if not (delta_x > 0 and delta_y > 0):
            raise ValueError("tile densities must be positive")
        self.delta_x = float(delta_x)
        self.delta_y = float(delta_y)
        self.tiles: dict[tuple[int, int], set] = defaultdict(set)
        self.frozen = False

    @classmethod
    def build(cls, sources: Sequence[Polygon], keys: Iterable | None = None) -> "GridIndex":
        idx = cls(*define_granularity(sources))
        keys = range(len(sources)) if keys is None else keys
        for key, s in zip(keys, sources):
            idx.add(key, s.mbr)
        return idx.freeze()

    def tile_range(self, box: Mbr) -> tuple[range, range]:
        ix = range(math.floor(box.min_x * self.delta_x), math.ceil(box.max_x * self.delta_x) + 1)
        iy = range(math.floor(box.min_y * self.delta_y), math.ceil(box.max_y * self.delta_y) + 1)
        return ix, iy

    def tile_count(self, box: Mbr) -> int:
        ix, iy = self.tile_range(box)
        return len(ix) * len(iy)

    def add(self, key, box: Mbr) -> None:
        if self.frozen:
            raise RuntimeError("index is frozen")
        ix, iy = self.tile_range(box)
        for i in ix:
            for j in iy:
                self.tiles[(i, j)].add(key)

    def freeze(self) -> "GridIndex":
        self.tiles = {k: frozenset(v) for k, v in self.tiles.items()}
        self.frozen = True
        return self

    def candidate_counts(self, box: Mbr) -> Counter:
        """Keys in the tiles under ``box``, each with the number of shared tiles."""
        counts: Counter = Counter()
        ix, iy = self.tile_range(box)
        if len(ix) * len(iy) > len(self.tiles):
            # query wider than the occupied grid: scan occupied tiles instead
            for (i, j), members in self.tiles.items():
                if i in ix and j in iy:
                    counts.update(members)
            return counts
        get = self.tiles.get
        for i in ix:
            for j in iy:
                members = get((i, j))
                if members:
                    counts.update(members)
        return counts

    def candidate_set(self, box: Mbr) -> set:
        return set(self.candidate_counts(box))


def add_to_index(idx: GridIndex, key, s: Polygon) -> GridIndex:
    idx.add(key, s.mbr)
    return idx


def candidate_set(idx: GridIndex, t: Polygon) -> set:
    return idx.candidate_set(t.mbr)
