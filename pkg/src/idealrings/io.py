"""Polygon file formats: plain text ("x y z" lines) and a JSON mirror.

A text record is one vertex per line, records separated by blank lines.
The JSON form is an array of polygons, each an array of [x, y, z]
vertices.  Both carry the n distinct vertices of a closed ring, starting
at the origin; edges are reconstructed as consecutive differences plus
the closing edge back to the first vertex.  Floats are written with repr
so values round-trip exactly.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from idealrings.geometry import Ring, vertices


class MalformedInputError(ValueError):
    """Unparseable polygon input; the message names the offending location."""


def _ring_from_vertices(rows: np.ndarray, where: str) -> Ring:
    if rows.shape[0] < 3:
        raise MalformedInputError(
            f"{where}: a polygon needs at least 3 vertices, got {rows.shape[0]}"
        )
    edges = np.empty_like(rows)
    edges[:-1] = rows[1:] - rows[:-1]
    edges[-1] = rows[0] - rows[-1]
    try:
        return Ring(edges)
    except ValueError as exc:
        raise MalformedInputError(f"{where}: {exc}") from None


def ring_vertex_rows(ring: Ring) -> np.ndarray:
    """The n distinct vertices of a ring, first at the origin."""
    return vertices(ring)[:-1]


def write_polygons_text(fileobj, rings: Iterable[Ring]) -> None:
    first = True
    for ring in rings:
        if not first:
            fileobj.write("\n")
        first = False
        for x, y, z in ring_vertex_rows(ring):
            fileobj.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")


def read_polygons_text(fileobj) -> list[Ring]:
    rings = []
    rows: list[list[float]] = []
    start_line = None

    def flush():
        nonlocal rows, start_line
        if rows:
            where = f"polygon starting at line {start_line}"
            rings.append(_ring_from_vertices(np.array(rows, dtype=np.float64), where))
            rows = []
            start_line = None

    for lineno, raw in enumerate(fileobj, start=1):
        line = raw.strip()
        if not line:
            flush()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise MalformedInputError(
                f"line {lineno}: expected three coordinates 'x y z', got {line!r}"
            )
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise MalformedInputError(
                f"line {lineno}: non-numeric coordinate in {line!r}"
            ) from None
        if start_line is None:
            start_line = lineno
        rows.append(row)
    flush()
    return rings


def write_polygons_json(fileobj, rings: Iterable[Ring]) -> None:
    payload = [
        [[float(x), float(y), float(z)] for x, y, z in ring_vertex_rows(ring)]
        for ring in rings
    ]
    json.dump(payload, fileobj)
    fileobj.write("\n")


def read_polygons_json(fileobj) -> list[Ring]:
    try:
        payload = json.load(fileobj)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(payload, list):
        raise MalformedInputError("top level must be an array of polygons")
    rings = []
    for p, poly in enumerate(payload):
        where = f"polygon {p}"
        if not isinstance(poly, list):
            raise MalformedInputError(f"{where}: expected an array of [x, y, z] vertices")
        rows = np.empty((len(poly), 3), dtype=np.float64)
        for v, vertex in enumerate(poly):
            if (
                not isinstance(vertex, Sequence)
                or len(vertex) != 3
                or not all(isinstance(c, (int, float)) for c in vertex)
            ):
                raise MalformedInputError(
                    f"{where}, vertex {v}: expected [x, y, z] numbers"
                )
            rows[v] = vertex
        rings.append(_ring_from_vertices(rows, where))
    return rings


def read_polygons(fileobj) -> list[Ring]:
    """Read either format, deciding by the first non-whitespace character."""
    text = fileobj.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        return read_polygons_json(_StringReader(text))
    return read_polygons_text(_StringReader(text))


class _StringReader:
    """Minimal file-like view over a string for the two readers."""

    def __init__(self, text: str):
        self._text = text

    def read(self) -> str:
        return self._text

    def __iter__(self):
        return iter(self._text.splitlines(keepends=True))
