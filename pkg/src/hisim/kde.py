"""Gaussian KDE on [0, 1] and the top-fraction similarity threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

MIN_SAMPLES = 30
BANDWIDTH_GRID = np.geomspace(0.005, 0.5, 20)
N_FOLDS = 5
GRID_POINTS = 4096

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class TooFewSamplesError(ValueError):
    """The sample cannot support a density fit; use the empirical quantile."""


def _truncated_pdf(x: np.ndarray, centers: np.ndarray, h: float) -> np.ndarray:
    # each kernel is renormalized to unit mass on [0, 1]
    mass = ndtr((1.0 - centers) / h) - ndtr(-centers / h)
    z = (x[:, None] - centers[None, :]) / h
    k = np.exp(-0.5 * z * z - _LOG_SQRT_2PI) / (h * mass[None, :])
    return k.mean(axis=1)


@dataclass(frozen=True, eq=False)
class KdeModel:
    samples: np.ndarray
    bandwidth: float
    cv_loglik: float = float("nan")

    def pdf(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        # chunked to bound memory on large samples
        step = max(1, 2_000_000 // max(len(self.samples), 1))
        for lo in range(0, len(x), step):
            out[lo : lo + step] = _truncated_pdf(x[lo : lo + step], self.samples, self.bandwidth)
        return out


def _check_samples(values) -> np.ndarray:
    x = np.asarray(values, dtype=float).ravel()
    if len(x) < MIN_SAMPLES:
        raise TooFewSamplesError(f"need at least {MIN_SAMPLES} samples, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    if np.ptp(x) == 0.0:
        raise TooFewSamplesError("samples have zero variance")
    return np.clip(x, 0.0, 1.0)


def cross_validated_loglik(x: np.ndarray, bandwidths, folds: list[np.ndarray]) -> np.ndarray:
    """Mean held-out log-likelihood of ``x`` for each bandwidth."""
    bandwidths = np.asarray(bandwidths, dtype=float)
    total = np.zeros(len(bandwidths))
    for k, test in enumerate(folds):
        train = x[np.concatenate([f for i, f in enumerate(folds) if i != k])]
        sq = (x[test][:, None] - train[None, :]) ** 2
        buf = np.empty_like(sq)
        for b, h in enumerate(bandwidths):
            mass = ndtr((1.0 - train) / h) - ndtr(-train / h)
            np.multiply(sq, -0.5 / (h * h), out=buf)
            np.exp(buf, out=buf)
            dens = (buf @ (1.0 / mass)) / (h * len(train) * math.sqrt(2.0 * math.pi))
            total[b] += float(np.sum(np.log(np.maximum(dens, 1e-300))))
    return total / len(x)


def fit_best_model(values, seed: int = 0) -> KdeModel:
    """Choose the bandwidth by 5-fold cross-validated mean log-likelihood.

    Candidates are 20 log-spaced bandwidths in [0.005, 0.5]; ties go to the
    larger bandwidth.  Fold membership comes from ``seed``.
    """
    x = _check_samples(values)
    perm = np.random.default_rng(seed).permutation(len(x))
    folds = np.array_split(perm, N_FOLDS)
    scores = cross_validated_loglik(x, BANDWIDTH_GRID, folds)
    best = int(np.flatnonzero(scores == scores.max())[-1])
    return KdeModel(x, float(BANDWIDTH_GRID[best]), float(scores[best]))


def estimate_threshold(model: KdeModel, top_fraction: float) -> float:
    """Value above which the fitted density holds ``top_fraction`` of its mass."""
    if not 0.0 < top_fraction < 1.0:
        raise ValueError("top_fraction must lie in (0, 1)")
    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    dens = model.pdf(grid)
    seg = 0.5 * (dens[1:] + dens[:-1]) * np.diff(grid)
    upper = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    upper /= upper[0]
    # upper is nonincreasing in x; interpolate on its reversal
    return float(np.interp(top_fraction, upper[::-1], grid[::-1]))


def empirical_threshold(values, top_fraction: float) -> float:
    """Nearest-rank (1 - top_fraction) quantile."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if len(x) == 0:
        raise ValueError("no values")
    rank = max(1, math.ceil((1.0 - top_fraction) * len(x)))
    return float(x[rank - 1])


def threshold_for(values, top_fraction: float, seed: int = 0) -> tuple[float, KdeModel | None]:
    """Threshold from a KDE fit, falling back to the empirical quantile.

    Returns the threshold and the fitted model (``None`` on fallback).
    """
    try:
        model = fit_best_model(values, seed)
    except TooFewSamplesError:
        return empirical_threshold(values, top_fraction), None
    return estimate_threshold(model, top_fraction), model
