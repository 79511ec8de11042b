import numpy as np
import pytest
from hypothesis import given, settings

from hisim.geometry import Polygon, mbr_intersects
from hisim.spatial_index import GridIndex, add_to_index, candidate_set, define_granularity
from hisim.synthetic import rectangle

from helpers import seeds

UNIT = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_granularity_examples():
    assert define_granularity([UNIT, UNIT]) == (1.0, 1.0)
    rects = [Polygon(rectangle(1, 0.25)), Polygon(rectangle(3, 0.75))]
    assert define_granularity(rects) == pytest.approx((0.5, 2.0))
    single = Polygon(rectangle(4, 0.5))
    assert define_granularity([single]) == pytest.approx((0.25, 2.0))
    with pytest.raises(ValueError):
        define_granularity([])


def test_unit_square_tiles():
    idx = GridIndex(1.0, 1.0)
    xs, ys = idx.tile_range(UNIT.mbr)
    assert {(i, j) for i in xs for j in ys} == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert idx.tile_count(UNIT.mbr) == 4


def test_tiny_polygon_tile_block():
    idx = GridIndex(1.0, 1.0)
    tiny = Polygon([(2.3, 5.4), (2.31, 5.4), (2.31, 5.41)])
    xs, ys = idx.tile_range(tiny.mbr)
    assert list(xs) == [2, 3] and list(ys) == [5, 6]


def test_add_is_idempotent():
    idx = GridIndex(1.0, 1.0)
    add_to_index(idx, 0, UNIT)
    before = {k: set(v) for k, v in idx.tiles.items()}
    add_to_index(idx, 0, UNIT)
    assert {k: set(v) for k, v in idx.tiles.items()} == before


def test_candidate_set_far_and_covering():
    sources = [Polygon(np.array(rectangle(1, 1)) + (3 * k, 0)) for k in range(5)]
    idx = GridIndex.build(sources)
    far = Polygon(rectangle(1, 1, center=(100, 100)))
    assert candidate_set(idx, far) == set()
    cover = Polygon(rectangle(40, 4, center=(6, 0)))
    assert candidate_set(idx, cover) == set(range(5))


def test_negative_coordinates():
    s = Polygon(rectangle(1, 1, center=(-5.5, -7.5)))
    idx = GridIndex.build([s])
    assert candidate_set(idx, Polygon(rectangle(0.2, 0.2, center=(-5.4, -7.4)))) == {0}


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_no_false_negatives(seed):
    rng = np.random.default_rng(seed)
    def box():
        c = rng.uniform(-20, 20, 2)
        return Polygon(rectangle(*rng.uniform(0.05, 4, 2), center=c))
    sources = [box() for _ in range(80)]
    targets = [box() for _ in range(40)]
    idx = GridIndex.build(sources)
    for t in targets:
        truth = {i for i, s in enumerate(sources) if mbr_intersects(s.mbr, t.mbr)}
        assert truth <= candidate_set(idx, t)


def test_insertion_order_does_not_matter():
    rng = np.random.default_rng(5)
    sources = [Polygon(rectangle(*rng.uniform(0.5, 2, 2), center=rng.uniform(-5, 5, 2))) for _ in range(30)]
    a = GridIndex.build(sources)
    b = GridIndex(*define_granularity(sources))
    for k in reversed(range(len(sources))):
        b.add(k, sources[k].mbr)
    b.freeze()
    q = Polygon(rectangle(4, 4))
    assert a.candidate_counts(q.mbr) == b.candidate_counts(q.mbr)
