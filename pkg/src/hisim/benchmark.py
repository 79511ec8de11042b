"""Desk-scale analysis helpers: top-fraction sweeps, SI histograms and
per-metric kernel timings."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import metrics as M
from .geometry import Polygon, center_at_origin
from .pipeline import (
    ORACLE_LIMIT,
    PipelineConfig,
    RunReport,
    ScaleGuardError,
    SimilarityCalculator,
    find_clusters,
    rankable,
    report,
)
from .synthetic import random_convex, random_star

N_BINS = 10

KERNELS = {
    "jaccard": M.jaccard,
    "area": M.area_similarity,
    "curvature": M.curvature_similarity,
    "fourier": M.fourier_similarity,
    "aspect_ratio": M.aspect_ratio_similarity,
    "perimeter": M.perimeter_similarity,
    "bbox_distance": M.bbox_distance_similarity,
    "circularity": M.circularity_similarity,
    "combined": M.combined_similarity,
}


def sweep(
    cfg: PipelineConfig,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    p_values: Sequence[float],
    *,
    with_oracle: bool = True,
) -> RunReport:
    """One run per top fraction, in ascending order of p."""
    return report(cfg, sources, targets, sorted(set(p_values)), with_oracle=with_oracle)


def si_histogram(
    values: Sequence[float], *, limit: int = ORACLE_LIMIT, force: bool = False
) -> np.ndarray:
    """Counts of SI values in ten equal bins over [0, 1]; 1.0 lands in the last bin."""
    if len(values) > limit and not force:
        raise ScaleGuardError(f"{len(values)} clusters exceed the brute-force limit {limit}")
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=N_BINS, range=(0.0, 1.0))
    return counts


def cluster_si_values(
    cfg: PipelineConfig,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    *,
    limit: int = ORACLE_LIMIT,
    force: bool = False,
) -> list[float]:
    scan = find_clusters(sources, targets, cfg)
    si = SimilarityCalculator.for_config(sources, targets, cfg)
    clusters = rankable(scan.clusters, si)
    if len(clusters) > limit and not force:
        raise ScaleGuardError(f"{len(clusters)} clusters exceed the brute-force limit {limit}")
    return [si(c) for c in clusters]


def write_histogram_csv(path, counts: Sequence[int]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_low", "bin_high", "count"])
        for k, n in enumerate(counts):
            w.writerow([f"{k / N_BINS:.1f}", f"{(k + 1) / N_BINS:.1f}", int(n)])


@dataclass(frozen=True)
class KernelTiming:
    metric: str
    n_pairs: int
    mean_ns: float
    std_ns: float


def timing_pairs(n_pairs: int, seed: int = 0) -> list[tuple[Polygon, Polygon]]:
    """Centered random pairs, alternating convex and star shapes."""
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(n_pairs):
        make = (lambda: random_convex(rng, 12)) if k % 2 else (lambda: random_star(rng, 12))
        pairs.append((center_at_origin(Polygon(make())), center_at_origin(Polygon(make()))))
    return pairs


def time_kernels(n_pairs: int, repeats: int = 3, seed: int = 0) -> list[KernelTiming]:
    """Mean and spread over ``repeats`` of the per-pair cost of each metric."""
    if n_pairs <= 0:
        return []
    pairs = timing_pairs(n_pairs, seed)
    table = []
    for name, fn in KERNELS.items():
        per_pair = []
        for _ in range(max(repeats, 1)):
            t0 = time.perf_counter_ns()
            for a, b in pairs:
                fn(a, b)
            per_pair.append((time.perf_counter_ns() - t0) / n_pairs)
        table.append(KernelTiming(name, n_pairs, float(np.mean(per_pair)), float(np.std(per_pair))))
    return table


def write_timing_csv(path, table: Sequence[KernelTiming]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "n_pairs", "mean_ns", "std_ns"])
        for t in table:
            w.writerow([t.metric, t.n_pairs, f"{t.mean_ns:.1f}", f"{t.std_ns:.1f}"])
