import pytest

from hisim.geometry import Polygon
from hisim.pipeline import ingest
from hisim.wkt import IngestError, WktParseError, format_polygon, parse_polygon, read_polygons, write_polygons


def test_parse_unit_square():
    p = Polygon(parse_polygon("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))"))
    assert p.area == 1.0 and len(p) == 4


@pytest.mark.parametrize(
    "text",
    [
        "POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0), (0.2 0.2, 0.4 0.2, 0.4 0.4, 0.2 0.2))",
        "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 0)))",
        "LINESTRING (0 0, 1 1)",
        "POLYGON Z ((0 0 1, 1 0 1, 1 1 1, 0 0 1))",
        "POLYGON EMPTY",
        "POLYGON ((0 0, 1 x, 1 1, 0 0))",
        "garbage",
    ],
)
def test_rejected_wkt(text):
    with pytest.raises(WktParseError):
        parse_polygon(text)


def test_roundtrip(tmp_path):
    p = Polygon([(0.1, 0.2), (3.3, 0.0), (1.0, 2.0 / 3.0)], "a")
    path = tmp_path / "x.wkt"
    write_polygons(path, [p])
    (q,) = read_polygons(path)
    assert q.id == "a" and (q.vertices == p.vertices).all()
    assert format_polygon(q) == format_polygon(p)


def test_line_number_ids_and_comments(tmp_path):
    path = tmp_path / "s.wkt"
    path.write_text(
        "POLYGON ((0 0, 1 0, 1 1, 0 0))\n"
        "POLYGON ((0 0, 2 0, 2 2, 0 0))\n"
        "POLYGON ((0 0, 3 0, 3 3, 0 0))\n"
    )
    assert [p.id for p in read_polygons(path)] == [0, 1, 2]
    path.write_text("# header\n\nPOLYGON ((0 0, 1 0, 1 1, 0 0))\n")
    assert [p.id for p in read_polygons(path)] == [2]


def test_invalid_rows_reported_with_line_numbers(tmp_path):
    path = tmp_path / "bad.wkt"
    path.write_text(
        "POLYGON ((0 0, 1 0, 1 1, 0 0))\n"
        "POLYGON ((0 0, 1 1))\n"
        "POLYGON ((0 0, 2 2, 2 0, 0 1, 0 0))\n"
    )
    with pytest.raises(IngestError) as err:
        read_polygons(path)
    assert [n for n, _ in err.value.problems] == [2, 3]
    assert "line 2" in str(err.value) and "self-intersecting" in str(err.value)
    assert len(read_polygons(path, strict=False)) == 1


def test_empty_file(tmp_path):
    path = tmp_path / "empty.wkt"
    path.write_text("\n")
    with pytest.raises(IngestError):
        read_polygons(path)


def test_ingest_pair(tmp_path):
    s, t = tmp_path / "s.wkt", tmp_path / "t.wkt"
    s.write_text("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))\n")
    t.write_text("7\tPOLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))\n")
    sources, targets = ingest(s, t)
    assert sources[0].id == 0 and targets[0].id == "7"
