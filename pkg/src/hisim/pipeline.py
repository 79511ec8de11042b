"""End-to-end search for the top-p most self-similar clusters.

Stages: grid filtering and cluster formation, a KDE threshold from a sample
of similarity indexes, classifier training on a labelled sample, a recall
simulation that sizes the verification budget, and budgeted verification
of all clusters in classifier order.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kde, scheduler
from .cluster import Cluster
from .features import MinMaxRegistry, SourceStats, cluster_pair_features, write_feature_csv
from .geometry import Polygon, center_at_origin, mbr_intersects
from .metrics import (
    EQUAL_WEIGHTS,
    FOURIER_POINTS,
    FOURIER_TERMS,
    MAX_EXACT_OBJECTS,
    MetricWeights,
    ShapeProfile,
    pair_plan,
    profile_similarity,
)
from .spatial_index import GridIndex
from .wkt import read_polygons

log = logging.getLogger(__name__)

ORACLE_LIMIT = 100_000


class ScaleGuardError(RuntimeError):
    """Brute force requested on more clusters than the configured limit."""


@dataclass(frozen=True)
class PipelineConfig:
    top_fraction: float = 0.1
    desired_recall: float = 0.9
    sample_size: int = 400
    class_size: int = 160
    weights: MetricWeights = EQUAL_WEIGHTS
    fourier_points: int = FOURIER_POINTS
    fourier_terms: int = FOURIER_TERMS
    seed: int = 0
    range_normalize: bool = False
    si_members: str = "with-rep"
    sampling: str = "uniform"
    full_budget: bool = False

    def __post_init__(self):
        if not 0.0 < self.top_fraction < 1.0:
            raise ValueError("top_fraction must lie in (0, 1)")
        if not 0.0 < self.desired_recall <= 1.0:
            raise ValueError("desired_recall must lie in (0, 1]")
        if self.class_size < 1:
            raise ValueError("class_size must be at least 1")
        if self.sample_size < 2 * self.class_size:
            raise ValueError("sample_size must be at least twice class_size")
        if self.si_members not in ("with-rep", "sources-only"):
            raise ValueError(f"unknown si_members {self.si_members!r}")
        if self.sampling not in ("pairs", "uniform"):
            raise ValueError(f"unknown sampling {self.sampling!r}")


def ingest(source_path, target_path) -> tuple[list[Polygon], list[Polygon]]:
    return read_polygons(source_path), read_polygons(target_path)


# ---------------------------------------------------------------------------
# cluster finding
# ---------------------------------------------------------------------------


@dataclass
class ClusterScan:
    clusters: list[Cluster]
    stats: SourceStats
    index: GridIndex
    sample: list[Cluster]
    kde_sample: list[Cluster]
    dropped_targets: int
    candidate_pairs: int


def _draw_samples(
    clusters: list[Cluster], pair_counts: np.ndarray, m: int, seed: int, sampling: str
) -> tuple[list[Cluster], list[Cluster]]:
    rng = np.random.default_rng(seed)
    if sampling == "uniform":
        order = rng.permutation(len(clusters))
        chosen = [clusters[i] for i in order[: 2 * m]]
    else:
        # pair ids are numbered target by target; a sampled id selects its target
        offsets = np.cumsum(pair_counts)
        ids = rng.permutation(int(offsets[-1])) if len(offsets) and offsets[-1] else np.array([], int)
        owner = np.searchsorted(offsets, ids, side="right")
        _, first = np.unique(owner, return_index=True)
        by_target = {c.cid: c for c in clusters}
        chosen = [by_target[t] for t in owner[np.sort(first)].tolist() if t in by_target]
        chosen = chosen[: 2 * m]
    return chosen[m : 2 * m], chosen[:m]


def find_clusters(
    sources: Sequence[Polygon], targets: Sequence[Polygon], cfg: PipelineConfig
) -> ClusterScan:
    """Filter with the tile grid and form one cluster per touched target.

    Returns the clusters, the per-source counters and two disjoint seeded
    cluster samples of at most ``cfg.sample_size`` each (the training sample
    and the KDE sample).
    """
    if not sources or not targets:
        raise ValueError("both datasets must be nonempty")
    idx = GridIndex.build(sources)
    stats = SourceStats.zeros(len(sources))
    clusters: list[Cluster] = []
    pair_counts = np.zeros(len(targets), dtype=np.int64)
    for ti, t in enumerate(targets):
        counts = idx.candidate_counts(t.mbr)
        members = []
        for s in sorted(counts):
            hit = mbr_intersects(sources[s].mbr, t.mbr)
            stats.record(s, counts[s], hit)
            if hit:
                members.append(s)
        pair_counts[ti] = len(counts)
        if members:
            clusters.append(Cluster(ti, tuple(members)))
    sample, kde_sample = _draw_samples(
        clusters, pair_counts, cfg.sample_size, cfg.seed, cfg.sampling
    )
    return ClusterScan(
        clusters=clusters,
        stats=stats,
        index=idx,
        sample=sample,
        kde_sample=kde_sample,
        dropped_targets=len(targets) - len(clusters),
        candidate_pairs=int(pair_counts.sum()),
    )


# ---------------------------------------------------------------------------
# similarity index with memoization
# ---------------------------------------------------------------------------


class SimilarityCalculator:
    """Memoized similarity index of clusters over fixed datasets.

    Polygons are centered and profiled once.  With ``si_members='with-rep'``
    the representative target joins the sources in the pair average.
    """

    def __init__(
        self,
        sources: Sequence[Polygon],
        targets: Sequence[Polygon],
        weights: MetricWeights = EQUAL_WEIGHTS,
        *,
        si_members: str = "with-rep",
        fourier_points: int = FOURIER_POINTS,
        fourier_terms: int = FOURIER_TERMS,
        max_exact: int = MAX_EXACT_OBJECTS,
        seed: int = 0,
    ):
        self.sources = sources
        self.targets = targets
        self.weights = weights
        self.si_members = si_members
        self.fourier = (fourier_points, fourier_terms)
        self.max_exact = max_exact
        self.seed = seed
        self._profiles: dict[tuple[str, int], ShapeProfile] = {}
        self._memo: dict[int, float] = {}
        self.sampled: set[int] = set()
        self.evaluations = 0

    @classmethod
    def for_config(cls, sources, targets, cfg: PipelineConfig) -> "SimilarityCalculator":
        return cls(
            sources,
            targets,
            cfg.weights,
            si_members=cfg.si_members,
            fourier_points=cfg.fourier_points,
            fourier_terms=cfg.fourier_terms,
            seed=cfg.seed,
        )

    def profile(self, kind: str, i: int) -> ShapeProfile:
        key = (kind, i)
        prof = self._profiles.get(key)
        if prof is None:
            poly = (self.sources if kind == "s" else self.targets)[i]
            prof = ShapeProfile.of(center_at_origin(poly), *self.fourier)
            self._profiles[key] = prof
        return prof

    def objects(self, c: Cluster) -> list[ShapeProfile]:
        objs = [self.profile("s", s) for s in c.members]
        if self.si_members == "with-rep":
            objs.insert(0, self.profile("t", c.target))
        return objs

    def n_objects(self, c: Cluster) -> int:
        return len(c.members) + (1 if self.si_members == "with-rep" else 0)

    def compute(self, c: Cluster) -> float:
        """Similarity index without touching the memo."""
        objs = self.objects(c)
        if len(objs) < 2:
            return 1.0
        ii, jj, sampled = pair_plan(len(objs), self.max_exact, self.seed + c.cid)
        if sampled:
            self.sampled.add(c.cid)
        total = math.fsum(
            profile_similarity(objs[i], objs[j], self.weights).combined
            for i, j in zip(ii.tolist(), jj.tolist())
        )
        return total / len(ii)

    def __call__(self, c: Cluster) -> float:
        value = self._memo.get(c.cid)
        if value is None:
            value = self.compute(c)
            self._memo[c.cid] = value
            self.evaluations += 1
        return value


def rankable(clusters: Sequence[Cluster], si: SimilarityCalculator) -> list[Cluster]:
    """Clusters that hold at least two objects; singletons have no pairs."""
    return [c for c in clusters if si.n_objects(c) >= 2]


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------


def brute_force_oracle(
    clusters: Sequence[Cluster],
    si: SimilarityCalculator,
    *,
    limit: int = ORACLE_LIMIT,
    force: bool = False,
) -> list[tuple[int, float]]:
    """Exact index of every cluster, sorted by SI descending then id."""
    if len(clusters) > limit and not force:
        raise ScaleGuardError(f"{len(clusters)} clusters exceed the brute-force limit {limit}")
    ranked = [(c.cid, si(c)) for c in clusters]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


def top_set(ranked: Sequence[tuple[int, float]], top_fraction: float) -> set[int]:
    """Ids of the first ``ceil(p * total)`` entries of an oracle ranking."""
    k = math.ceil(top_fraction * len(ranked) - 1e-9)
    return {cid for cid, _ in ranked[:k]}


def achieved_recall(links: Sequence[tuple[int, float]], truth: set[int]) -> float:
    if not truth:
        return 1.0
    found = {cid for cid, _ in links}
    return len(found & truth) / len(truth)


# ---------------------------------------------------------------------------
# full run
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    p: float
    targeted_fraction: float
    checked_fraction: float
    ratio: float
    achieved_recall: float | None = None
    wall_time: float = 0.0


@dataclass
class RunReport:
    rows: list[ReportRow] = field(default_factory=list)


@dataclass
class RunResult:
    links: list[tuple[int, float]]
    threshold: float
    budget: scheduler.BudgetEstimate
    max_size: int
    verification: scheduler.VerificationResult
    features: dict[int, np.ndarray]
    metrics: dict
    row: ReportRow


def _score_clusters(clusters, reg, model, sources, targets, stats, idx):
    feats = {
        c.cid: reg.cluster_vector(cluster_pair_features(c, sources, targets, stats, idx))
        for c in clusters
    }
    if not feats:
        return feats, {}
    ids = list(feats)
    probs = model.score_many(np.vstack([feats[i] for i in ids]))
    return feats, dict(zip(ids, probs.tolist()))


def run(
    cfg: PipelineConfig,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    *,
    scan: ClusterScan | None = None,
    si: SimilarityCalculator | None = None,
    oracle: Sequence[tuple[int, float]] | None = None,
) -> RunResult:
    """Run every phase and return the verified links plus run metrics.

    ``scan`` and ``si`` may be shared between runs over the same datasets
    (e.g. a sweep over ``top_fraction``); ``oracle`` enables the achieved
    recall column.
    """
    start = time.perf_counter()
    p, n_class = cfg.top_fraction, cfg.class_size
    scan = scan or find_clusters(sources, targets, cfg)
    si = si or SimilarityCalculator.for_config(sources, targets, cfg)
    clusters = rankable(scan.clusters, si)
    kde_sample = rankable(scan.kde_sample, si)
    sample = rankable(scan.sample, si)
    metrics: dict = {
        "top_fraction": p,
        "desired_recall": cfg.desired_recall,
        "total_clusters": len(clusters),
        "dropped_targets": scan.dropped_targets,
        "singleton_clusters": len(scan.clusters) - len(clusters),
        "kde_sample_size": len(kde_sample),
        "train_sample_size": len(sample),
    }

    # threshold from the KDE sample
    values = [si(c) for c in kde_sample]
    if values:
        threshold, model_kde = kde.threshold_for(values, p, cfg.seed)
    else:
        threshold, model_kde = 1.0, None
    metrics["threshold"] = threshold
    metrics["kde_bandwidth"] = model_kde.bandwidth if model_kde else None
    metrics["kde_fallback"] = model_kde is None

    # labelling and training
    rng = np.random.default_rng(cfg.seed + 1)
    shuffled = [sample[i] for i in rng.permutation(len(sample))]
    pos, neg, short = scheduler.label_sample(shuffled, threshold, n_class, si)
    labelled = sorted(pos + neg, key=lambda c: c.cid)
    metrics.update(positives=len(pos), negatives=len(neg), class_shortfall=short)
    if labelled:
        blocks = [
            cluster_pair_features(c, sources, targets, scan.stats, scan.index) for c in labelled
        ]
        reg = MinMaxRegistry.fit(blocks, range_normalize=cfg.range_normalize)
    else:
        reg = None
    if pos and neg:
        X = np.vstack([reg.cluster_vector(b) for b in blocks])
        y = [1 if si(c) >= threshold else 0 for c in labelled]
        model = scheduler.train(X=X, y=y)
        metrics["classifier_iterations"] = model.iterations
        metrics["classifier_loss"] = model.final_loss
    else:
        log.warning("training sample holds a single class; using a constant scorer")
        model = scheduler.LogisticClassifier(np.zeros(16))
        if reg is None:
            reg = MinMaxRegistry.fit(
                [cluster_pair_features(c, sources, targets, scan.stats, scan.index) for c in clusters[:1]],
                range_normalize=cfg.range_normalize,
            )
        metrics["classifier_iterations"] = 0
        metrics["classifier_loss"] = None

    feats, weights = _score_clusters(
        clusters, reg, model, sources, targets, scan.stats, scan.index
    )
    weight = lambda c: weights[c.cid]  # noqa: E731

    # recall simulation and budget
    budget = scheduler.simulate_recall(kde_sample, weight, si, threshold, p, n_class)
    max_size = scheduler.compute_max_size(cfg.desired_recall, budget, n_class, len(clusters))
    if cfg.full_budget:
        max_size = len(clusters)
    metrics.update(
        recall_approx=budget.recall_approx,
        high_sim_indices=budget.high_sim_indices,
        simulation_hits=budget.hits,
        simulation_degenerate=budget.degenerate,
        max_size=max_size,
    )

    ver = scheduler.verify(clusters, weight, si, threshold, max_size)
    metrics.update(checked=ver.checked, hits=ver.hits, checked_fraction=ver.checked_fraction)
    metrics["sampled_si_clusters"] = sorted(si.sampled)

    recall = None
    if oracle is not None:
        recall = achieved_recall(ver.links, top_set(oracle, p))
        metrics["achieved_recall_vs_oracle"] = recall
    row = ReportRow(
        p=p,
        targeted_fraction=p,
        checked_fraction=ver.checked_fraction,
        ratio=ver.checked_fraction / p,
        achieved_recall=recall,
        wall_time=time.perf_counter() - start,
    )
    return RunResult(
        links=ver.links,
        threshold=threshold,
        budget=budget,
        max_size=max_size,
        verification=ver,
        features=feats,
        metrics=metrics,
        row=row,
    )


def report(
    cfg: PipelineConfig,
    sources: Sequence[Polygon],
    targets: Sequence[Polygon],
    p_values: Sequence[float],
    *,
    with_oracle: bool = True,
) -> RunReport:
    """One run per top fraction, sharing clusters and similarity memo."""
    rows = []
    if p_values:
        scan = find_clusters(sources, targets, cfg)
        si = SimilarityCalculator.for_config(sources, targets, cfg)
        oracle = brute_force_oracle(rankable(scan.clusters, si), si) if with_oracle else None
        for p in p_values:
            res = run(replace(cfg, top_fraction=p), sources, targets, scan=scan, si=si, oracle=oracle)
            rows.append(res.row)
    return RunReport(rows)


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

REPORT_COLUMNS = ("p", "targeted_fraction", "checked_fraction", "checked_to_targeted", "achieved_recall")


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def write_report_csv(path, rep: RunReport) -> None:
    """Tabular coverage report; wall times are left out so files are reproducible."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_COLUMNS)
        for r in rep.rows:
            w.writerow([_fmt(r.p), _fmt(r.targeted_fraction), _fmt(r.checked_fraction), _fmt(r.ratio), _fmt(r.achieved_recall)])


def write_links_csv(path, links, targets: Sequence[Polygon]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster_id", "target_id", "similarity_index"])
        for cid, value in links:
            w.writerow([cid, targets[cid].id, repr(float(value))])


def write_oracle_csv(path, ranked, targets: Sequence[Polygon]) -> None:
    write_links_csv(path, ranked, targets)


def write_run(out_dir, result: RunResult, targets: Sequence[Polygon]) -> Path:
    """Write links.csv, features.csv, metrics.json, report.csv and timing.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_links_csv(out / "links.csv", result.links, targets)
    write_feature_csv(out / "features.csv", sorted(result.features.items()))
    with open(out / "metrics.json", "w") as fh:
        json.dump(result.metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_report_csv(out / "report.csv", RunReport([result.row]))
    with open(out / "timing.json", "w") as fh:
        json.dump({"wall_time_s": result.row.wall_time}, fh)
        fh.write("\n")
    return out


def config_dict(cfg: PipelineConfig) -> dict:
    d = asdict(cfg)
    d["weights"] = list(cfg.weights.as_tuple())
    return d
