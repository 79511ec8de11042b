"""Compare a few polygons metric by metric.

A square, the same square nudged sideways, a long rectangle and an octagon
are centered and scored against the square.  Note how the bounding-box
metric stays at 1 once everything sits on the origin.
"""

from hisim.geometry import Polygon, center_at_origin, intersection_area, translate
from hisim.metrics import METRIC_NAMES, pair_similarity, similarity_index
from hisim.synthetic import rectangle, regular_polygon

square = Polygon([(0, 0), (2, 0), (2, 2), (0, 2)])
shapes = {
    "moved square": translate(square, 40.0, -7.5),
    "long rectangle": Polygon(rectangle(4.0, 1.0)),
    "octagon": Polygon(regular_polygon(8, 1.2)),
}

print("raw overlap of square and moved square:", intersection_area(square, shapes["moved square"]))
print()
print(f"{'shape':16s}" + "".join(f"{n[:9]:>10s}" for n in METRIC_NAMES) + f"{'combined':>10s}")
for name, shape in shapes.items():
    s = pair_similarity(square, shape)
    print(f"{name:16s}" + "".join(f"{v:10.3f}" for v in s.metrics()) + f"{s.combined:10.3f}")

group = [center_at_origin(p) for p in (square, *shapes.values())]
print()
print("similarity index of all four shapes together:", round(similarity_index(group), 4))
