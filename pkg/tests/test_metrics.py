import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from hisim.geometry import Polygon, center_at_origin, translate
from hisim.metrics import (
    EQUAL_WEIGHTS,
    METRIC_NAMES,
    MetricWeights,
    ShapeProfile,
    _curvature,
    _inverse_gap,
    area_similarity,
    aspect_ratio_similarity,
    bbox_distance_similarity,
    circularity,
    circularity_similarity,
    combined_similarity,
    curvature_similarity,
    fourier_descriptor,
    fourier_similarity,
    jaccard,
    mean_of_pairs,
    pair_plan,
    pair_similarity,
    perimeter_similarity,
    similarity_index,
)
from hisim.synthetic import rectangle, regular_polygon

from helpers import random_polygon, seeds

UNIT = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
SHIFTED = translate(UNIT, 0.5, 0)
FAR = translate(UNIT, 5, 5)


def test_overlap_metrics_examples():
    assert jaccard(UNIT, UNIT) == 1.0
    assert jaccard(UNIT, FAR) == 0.0
    assert jaccard(UNIT, SHIFTED) == pytest.approx(1 / 3, abs=1e-12)
    assert area_similarity(UNIT, UNIT) == 1.0
    assert area_similarity(UNIT, FAR) == 0.0
    assert area_similarity(UNIT, SHIFTED) == pytest.approx(0.5, abs=1e-12)


def test_curvature_examples():
    assert curvature_similarity(UNIT, translate(UNIT, 3, 0)) == 1.0
    octagon = Polygon(regular_polygon(8))
    assert curvature_similarity(UNIT, octagon) == pytest.approx(math.exp(-0.5), abs=1e-12)
    tri = Polygon([(0, 0), (1, 0), (0, 1)])
    assert curvature_similarity(tri, Polygon(regular_polygon(300))) == pytest.approx(
        math.exp(-297 / 300), abs=1e-12
    )
    assert _curvature(3, 300) == pytest.approx(0.3716, abs=1e-4)


def test_fourier_descriptor_of_circle():
    f = fourier_descriptor(Polygon(regular_polygon(64, 3.0)))
    assert f[0] == 1.0
    assert np.all(np.abs(f[1:]) < 1e-9)


def test_fourier_similarity_and_inverse_gap():
    sq = center_at_origin(UNIT)
    assert fourier_similarity(sq, sq) == 1.0
    assert _inverse_gap(1.0) == 0.5
    assert _inverse_gap(3.0) == 0.25
    # scale invariance of the normalized magnitudes
    assert fourier_similarity(sq, Polygon(sq.vertices * 7)) == pytest.approx(1.0, abs=1e-12)


def test_aspect_ratio_examples():
    assert aspect_ratio_similarity(UNIT, UNIT) == 1.0
    assert aspect_ratio_similarity(Polygon(rectangle(2, 1)), UNIT) == 0.5
    assert aspect_ratio_similarity(Polygon(rectangle(4, 1)), UNIT) == 0.25


def test_perimeter_examples():
    assert perimeter_similarity(UNIT, UNIT) == 1.0
    assert perimeter_similarity(UNIT, Polygon(rectangle(1.5, 1))) == 0.5
    assert perimeter_similarity(UNIT, Polygon(rectangle(2, 2))) == 0.2


def test_bbox_distance_examples():
    assert bbox_distance_similarity(UNIT, UNIT) == 1.0
    assert bbox_distance_similarity(UNIT, translate(UNIT, 1, 0)) == 0.5
    assert bbox_distance_similarity(UNIT, translate(UNIT, 0, 3)) == 0.25


def test_circularity_examples():
    assert circularity(UNIT) == pytest.approx(math.pi / 4, abs=1e-12)
    values = [circularity(Polygon(regular_polygon(n))) for n in (6, 12, 48, 400)]
    assert values == sorted(values) and values[-1] > 0.9999
    tri = Polygon([(0, 0), (4, 0), (0, 3)])
    assert circularity(tri) == pytest.approx(math.pi / 6, abs=1e-12)
    assert circularity_similarity(UNIT, tri) == pytest.approx(0.7926, abs=1e-4)
    assert circularity_similarity(UNIT, UNIT) == 1.0


def test_weights_validation():
    with pytest.raises(ValueError):
        MetricWeights(w_jaccard=0.5)
    with pytest.raises(ValueError):
        MetricWeights.from_sequence([1, 0, 0])
    with pytest.raises(ValueError):
        MetricWeights.from_sequence([1.5, -0.5, 0, 0, 0, 0, 0, 0])
    assert sum(EQUAL_WEIGHTS.as_tuple()) == 1.0


def test_combined_identity_and_projection():
    rng = np.random.default_rng(0)
    a = center_at_origin(random_polygon(rng))
    b = center_at_origin(random_polygon(rng))
    assert combined_similarity(a, a).combined == pytest.approx(1.0, abs=1e-12)
    ps = combined_similarity(a, b)
    assert ps.combined == pytest.approx(sum(ps.metrics()) / 8, abs=1e-15)
    for k, name in enumerate(METRIC_NAMES):
        one = combined_similarity(a, b, MetricWeights.one_hot(name))
        assert one.combined == pytest.approx(ps.metrics()[k], abs=1e-15)
    assert ps.jaccard == pytest.approx(jaccard(a, b), abs=1e-15)
    assert ps.fourier == pytest.approx(fourier_similarity(a, b), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    a = center_at_origin(random_polygon(rng))
    b = center_at_origin(random_polygon(rng))
    ab, ba = combined_similarity(a, b), combined_similarity(b, a)
    assert ab == ba
    assert all(0.0 <= v <= 1.0 for v in ab.metrics())
    assert ab.curvature >= math.exp(-1) - 1e-15
    assert 0.0 <= ab.combined <= 1.0
    assert all(v >= 1 - 1e-9 for v in combined_similarity(a, a).metrics())


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_pair_similarity_translation_invariant(seed):
    rng = np.random.default_rng(seed)
    a, b = random_polygon(rng), random_polygon(rng)
    base = pair_similarity(a, b).metrics()
    v = rng.uniform(-100, 100, 2)
    moved = pair_similarity(translate(a, *v), b).metrics()
    assert np.allclose(base, moved, atol=1e-9, rtol=0)


def test_similarity_index_examples():
    sq = center_at_origin(UNIT)
    assert similarity_index([sq] * 5) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(4)
    a, b = center_at_origin(random_polygon(rng)), center_at_origin(random_polygon(rng))
    assert similarity_index([a, b]) == combined_similarity(a, b).combined
    assert mean_of_pairs([0.9, 0.8, 0.7]) == pytest.approx(0.8, abs=1e-15)
    assert similarity_index([a]) == 1.0


def test_similarity_index_brute_force():
    rng = np.random.default_rng(11)
    for k in range(2, 9):
        objs = [center_at_origin(random_polygon(rng)) for _ in range(k)]
        scores = [combined_similarity(x, y).combined for x, y in itertools.combinations(objs, 2)]
        expected = sum(scores) / len(scores)
        assert similarity_index(objs) == pytest.approx(expected, abs=1e-12)
        profiles = [ShapeProfile.of(o) for o in objs]
        assert similarity_index(profiles) == similarity_index(objs)


def test_pair_plan_exact_and_sampled():
    i, j, sampled = pair_plan(5)
    assert not sampled and len(i) == 10 and np.all(i < j)
    i, j, sampled = pair_plan(250, max_exact=200, seed=3)
    assert sampled and len(i) == 200 * 199 // 2
    assert len(set(zip(i.tolist(), j.tolist()))) == len(i)
    i2, j2, _ = pair_plan(250, max_exact=200, seed=3)
    assert np.array_equal(i, i2) and np.array_equal(j, j2)
