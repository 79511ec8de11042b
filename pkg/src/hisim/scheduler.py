"""Supervised scheduling: labelling, the classifier, recall simulation and
budgeted verification.

Clusters are handled as opaque objects with an integer ``cid``.  Similarity
indexes and classifier weights arrive through callables so the same code
runs against real clusters or against hand-built test doubles.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

log = logging.getLogger(__name__)


class SingleClassError(ValueError):
    """Training data contains only one label."""


@dataclass(frozen=True)
class LabeledCluster:
    cid: int
    features: np.ndarray
    label: int
    true_si: float


class Scorer(Protocol):
    def score(self, u) -> float: ...

    def score_many(self, rows) -> np.ndarray: ...


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LogisticClassifier:
    """Logistic model over standardized features."""

    coef: np.ndarray
    intercept: float = 0.0
    mean: np.ndarray | None = None
    scale: np.ndarray | None = None
    iterations: int = 0
    final_loss: float = float("nan")

    @property
    def n_features(self) -> int:
        return len(self.coef)

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        if self.mean is None:
            return X
        return (X - self.mean) / self.scale

    def score_many(self, rows) -> np.ndarray:
        X = np.atleast_2d(np.asarray(rows, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        p = _sigmoid(self._standardize(X) @ self.coef + self.intercept)
        # keep strictly inside (0, 1) for finite inputs
        return np.clip(p, 1e-300, np.nextafter(1.0, 0.0))

    def score(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if u.ndim != 1:
            raise ValueError("score expects a single feature vector")
        return float(self.score_many(u[None, :])[0])


def train(
    labeled: Sequence[LabeledCluster] | None = None,
    *,
    X=None,
    y=None,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
    max_iter: int = 500,
    tol: float = 1e-6,
) -> LogisticClassifier:
    """Full-batch gradient descent on the L2-regularized logistic loss.

    Features are standardized with the training mean and standard deviation
    and parameters start at zero, so training is deterministic.
    """
    if labeled is not None:
        X = np.vstack([lc.features for lc in labeled])
        y = np.array([lc.label for lc in labeled], dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise SingleClassError("training needs both classes")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale
    n, d = Z.shape
    w = np.zeros(d)
    b = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        p = _sigmoid(Z @ w + b)
        r = p - y
        gw = Z.T @ r / n + l2 * w
        gb = float(r.mean())
        if math.sqrt(float(gw @ gw) + gb * gb) < tol:
            break
        w -= learning_rate * gw
        b -= learning_rate * gb
    p = np.clip(_sigmoid(Z @ w + b), 1e-15, 1 - 1e-15)
    loss = float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)) + 0.5 * l2 * float(w @ w))
    return LogisticClassifier(w, b, mean, scale, iterations=it, final_loss=loss)


def score(model: Scorer, u) -> float:
    return model.score(u)


class RankedQueue:
    """Max-priority queue of cluster ids; equal weights pop by ascending id."""

    def __init__(self, items: Iterable[tuple[int, float]] = ()):
        self._heap = [(-float(w), int(cid)) for cid, w in items]
        heapq.heapify(self._heap)

    def push(self, cid: int, weight: float) -> None:
        heapq.heappush(self._heap, (-float(weight), int(cid)))

    def pop(self) -> tuple[int, float]:
        w, cid = heapq.heappop(self._heap)
        return cid, -w

    def truncate(self, size: int) -> None:
        """Keep only the ``size`` highest-priority entries."""
        self._heap = heapq.nsmallest(max(size, 0), self._heap)
        heapq.heapify(self._heap)

    def ids(self) -> list[int]:
        return [cid for _, cid in self._heap]

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


def label_sample(
    sample: Sequence,
    threshold: float,
    class_size: int,
    si: Callable[[object], float],
) -> tuple[list, list, bool]:
    """Split the (already shuffled) sample into positives and negatives.

    Stops once both classes hold ``class_size`` clusters.  The third value is
    True when the sample ran out first.
    """
    if class_size < 1:
        raise ValueError("class_size must be at least 1")
    pos, neg = [], []
    for c in sample:
        (pos if si(c) >= threshold else neg).append(c)
        if len(pos) >= class_size and len(neg) >= class_size:
            return pos, neg, False
    log.warning(
        "sample exhausted before both classes filled: %d positive, %d negative",
        len(pos),
        len(neg),
    )
    return pos, neg, True


@dataclass(frozen=True)
class BudgetEstimate:
    recall_approx: float
    high_sim_indices: int
    hits: int
    pops: int
    degenerate: bool = False


def _queue(clusters: Sequence, weight: Callable[[object], float]) -> tuple[RankedQueue, dict]:
    by_id = {c.cid: c for c in clusters}
    return RankedQueue((c.cid, weight(c)) for c in clusters), by_id


def simulate_recall(
    kde_sample: Sequence,
    weight: Callable[[object], float],
    si: Callable[[object], float],
    threshold: float,
    top_fraction: float,
    class_size: int,
) -> BudgetEstimate:
    """Replay verification on the KDE sample to estimate achievable recall.

    The queue is cut to the ``class_size`` best-weighted clusters; the
    positives among them are counted, then ``ceil(top_fraction * class_size)``
    clusters are popped and the hits counted.
    """
    pq, by_id = _queue(kde_sample, weight)
    pq.truncate(class_size)
    high = sum(1 for cid in pq.ids() if si(by_id[cid]) >= threshold)
    limit = math.ceil(top_fraction * class_size)
    hits = pops = 0
    while pq and pops < limit:
        cid, _ = pq.pop()
        pops += 1
        if si(by_id[cid]) >= threshold:
            hits += 1
    if high == 0:
        return BudgetEstimate(1.0, 0, hits, pops, degenerate=True)
    if hits == 0:
        # nothing found in the simulated budget; treat as one hit so the
        # budget formula stays finite and maximal
        return BudgetEstimate(1.0 / high, high, 0, pops, degenerate=True)
    return BudgetEstimate(hits / high, high, hits, pops)


def compute_max_size(
    desired_recall: float,
    est: BudgetEstimate,
    class_size: int,
    total_clusters: int,
) -> int:
    """``ceil(r_d / recall_approx * high / N * total)`` clamped to [0, total]."""
    if not 0.0 < desired_recall <= 1.0:
        raise ValueError("desired recall must lie in (0, 1]")
    if est.recall_approx <= 0:
        raise ZeroDivisionError("recall estimate must be positive")
    raw = desired_recall / est.recall_approx * (est.high_sim_indices / class_size) * total_clusters
    # absorb representation error such as 0.95 / 0.5 * 0.1 * 1000 = 190.00000000000003
    raw = round(raw, 9)
    return int(min(max(math.ceil(raw), 0), total_clusters))


@dataclass
class VerificationResult:
    links: list[tuple[int, float]] = field(default_factory=list)
    checked: int = 0
    hits: int = 0
    total: int = 0

    @property
    def checked_fraction(self) -> float:
        return self.checked / self.total if self.total else 0.0


def verify(
    clusters: Sequence,
    weight: Callable[[object], float],
    si: Callable[[object], float],
    threshold: float,
    max_size: int,
) -> VerificationResult:
    """Pop clusters by descending weight, keep those with SI >= threshold.

    At most ``max_size`` clusters are checked.  Links are returned sorted by
    SI descending, ties by cluster id.
    """
    pq, by_id = _queue(clusters, weight)
    res = VerificationResult(total=len(clusters))
    while pq and res.checked < max_size:
        cid, _ = pq.pop()
        res.checked += 1
        value = si(by_id[cid])
        if value >= threshold:
            res.links.append((cid, value))
            res.hits += 1
    res.links.sort(key=lambda item: (-item[1], item[0]))
    return res
