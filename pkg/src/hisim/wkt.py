"""Line-oriented WKT input and output.

Each non-blank line holds one ``POLYGON`` either bare or as ``id<TAB>WKT``.
Lines starting with ``#`` are ignored.  Only single exterior rings are
accepted.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .geometry import InvalidGeometryError, Polygon

log = logging.getLogger(__name__)

_TYPE = re.compile(r"^\s*([A-Za-z]+)\s*(Z|M|ZM)?\s*(\(.*\)|EMPTY)\s*$", re.S)


class WktParseError(ValueError):
    """Malformed or unsupported WKT text."""


@dataclass
class IngestError(ValueError):
    path: str
    problems: list[tuple[int, str]]

    def __str__(self) -> str:
        head = f"{self.path}: {len(self.problems)} invalid row(s)"
        lines = [f"  line {n}: {msg}" for n, msg in self.problems[:20]]
        if len(self.problems) > 20:
            lines.append(f"  ... {len(self.problems) - 20} more")
        return "\n".join([head, *lines])


def parse_polygon(text: str) -> list[tuple[float, float]]:
    """Vertex list of a WKT ``POLYGON`` with a single ring."""
    m = _TYPE.match(text)
    if not m:
        raise WktParseError(f"not a WKT geometry: {text[:40]!r}")
    kind, dims, body = m.group(1).upper(), m.group(2), m.group(3)
    if kind != "POLYGON":
        raise WktParseError(f"unsupported geometry type {kind}; only POLYGON is accepted")
    if dims:
        raise WktParseError(f"only 2D coordinates are supported, got POLYGON {dims}")
    if body.upper() == "EMPTY":
        raise WktParseError("empty polygon")
    inner = body.strip()[1:-1].strip()
    rings = re.findall(r"\(([^()]*)\)", inner)
    if not rings or re.sub(r"\([^()]*\)", "", inner).replace(",", "").strip():
        raise WktParseError("malformed ring list")
    if len(rings) > 1:
        raise WktParseError("polygons with holes are not supported")
    pts = []
    for tok in rings[0].split(","):
        parts = tok.split()
        if len(parts) != 2:
            raise WktParseError(f"expected 2 coordinates, got {tok.strip()!r}")
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise WktParseError(f"bad coordinate {tok.strip()!r}") from None
    return pts


def format_polygon(p: Polygon) -> str:
    v = p.vertices
    ring = [*v.tolist(), v[0].tolist()]
    return "POLYGON ((" + ", ".join(f"{x!r} {y!r}" for x, y in ring) + "))"


def read_polygons(path, *, strict: bool = True) -> list[Polygon]:
    """Read one polygon per line.

    Ids come from an ``id<TAB>`` prefix when present, otherwise the 0-based
    line number.  With ``strict`` any bad row raises :class:`IngestError`
    listing every problem; otherwise bad rows are logged and skipped.
    """
    path = Path(path)
    out: list[Polygon] = []
    problems: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            pid, text = lineno, line
            if "\t" in line:
                pid, text = line.split("\t", 1)
                pid = pid.strip()
            try:
                out.append(Polygon(parse_polygon(text), pid))
            except (WktParseError, InvalidGeometryError) as exc:
                problems.append((lineno + 1, str(exc)))
    if problems:
        err = IngestError(str(path), problems)
        if strict:
            raise err
        log.warning("%s", err)
    if not out:
        raise IngestError(str(path), [(0, "no polygons found")])
    return out


def write_polygons(path, polygons, *, with_ids: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in polygons:
            row = format_polygon(p)
            fh.write(f"{p.id}\t{row}\n" if with_ids else row + "\n")
