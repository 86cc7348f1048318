"""Reading shapes and writing chains, towers, samples and polylines.

All numbers that are not integers are written as exact strings
(``"p/2^q"``) so every JSON document reloads to an equal value.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .chains import Chain, RefinementCode
from .curve import CurveTower, ParamBreaks, TowerLevel
from .geometry import DyadicCompactum, GeometryError, Point, compactum, format_dyadic, parse_dyadic


class ShapeFormatError(ValueError):
    """Input text is not a valid shape description."""


# ---------------------------------------------------------------------------
# shapes


def parse_ascii(text: str) -> DyadicCompactum:
    """Grid of ``#`` (cell) and ``.`` (empty); row 0 is the top row.

    The level is the least ``r`` with ``2**r`` at least the grid's width and
    height, and row ``i`` of an ``h``-row grid has y index ``h - 1 - i``.
    """
    rows = [line.rstrip("\r") for line in text.splitlines() if line.strip()]
    if not rows:
        raise ShapeFormatError("empty grid")
    width = max(len(r) for r in rows)
    height = len(rows)
    level = max(max(width, height) - 1, 0).bit_length()
    cells = []
    for i, row in enumerate(rows):
        for j, ch in enumerate(row):
            if ch == "#":
                cells.append((j, height - 1 - i))
            elif ch != ".":
                raise ShapeFormatError(f"unexpected character {ch!r} in row {i}")
    if not cells:
        raise ShapeFormatError("grid has no cells")
    return compactum(2, level, cells)


def shape_to_dict(K: DyadicCompactum) -> dict[str, Any]:
    return {"dim": K.dim, "level": K.level, "cells": [list(c) for c in K.cells]}


def shape_from_dict(data: Any) -> DyadicCompactum:
    try:
        dim, level, cells = data["dim"], data["level"], data["cells"]
    except (KeyError, TypeError) as exc:
        raise ShapeFormatError("shape needs 'dim', 'level' and 'cells'") from exc
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (dim, level)):
        raise ShapeFormatError("'dim' and 'level' must be integers")
    if not isinstance(cells, list) or not all(isinstance(c, list) for c in cells):
        raise ShapeFormatError("'cells' must be a list of index lists")
    try:
        return compactum(dim, level, cells)
    except GeometryError as exc:
        raise ShapeFormatError(str(exc)) from exc


def parse_shape(text: str) -> DyadicCompactum:
    """JSON shape object if the text starts with ``{``, otherwise an ASCII grid."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ShapeFormatError(f"invalid JSON: {exc}") from exc
        return shape_from_dict(data)
    return parse_ascii(text)


def load_shape(path: str | Path) -> DyadicCompactum:
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ShapeFormatError(f"cannot read {path}: {exc}") from exc
    return parse_shape(text)


def to_ascii(K: DyadicCompactum) -> str:
    if K.dim != 2:
        raise ShapeFormatError("ASCII grids are two-dimensional")
    n = 1 << K.level
    cells = K.cellset
    rows = ["".join("#" if (x, y) in cells else "." for x in range(n)) for y in reversed(range(n))]
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# chains and towers


def point_json(p: Point) -> list[str]:
    return [format_dyadic(v) for v in p]


def chain_to_dict(chain: Chain) -> dict[str, Any]:
    return {
        "epsilon": format_dyadic(chain.epsilon),
        "pieces": [shape_to_dict(p) for p in chain.pieces],
    }


def chain_from_dict(data: dict[str, Any]) -> Chain:
    return Chain(
        tuple(shape_from_dict(p) for p in data["pieces"]),
        parse_dyadic(data["epsilon"]),
    )


def code_to_dict(code: RefinementCode) -> dict[str, Any]:
    return {"mu": list(code.mu), "nu": list(code.nu)}


def code_from_dict(data: dict[str, Any]) -> RefinementCode:
    return RefinementCode(tuple(data["mu"]), tuple(data["nu"]))


def fraction_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def tower_to_dict(tower: CurveTower) -> dict[str, Any]:
    # breakpoints need not be dyadic, so they are written as plain fractions
    return {
        "ambient": shape_to_dict(tower.ambient),
        "levels": [
            {
                "epsilon": format_dyadic(lv.epsilon),
                "breaks": [fraction_text(b) for b in lv.breaks.values],
                "chain": chain_to_dict(lv.chain),
                "code": code_to_dict(lv.code),
            }
            for lv in tower.levels
        ],
    }


def tower_from_dict(data: dict[str, Any]) -> CurveTower:
    levels = []
    for lv in data["levels"]:
        chain = chain_from_dict(lv["chain"])
        breaks = ParamBreaks.from_values([Fraction(b) for b in lv["breaks"]])
        levels.append(TowerLevel(chain, breaks, code_from_dict(lv["code"])))
    return CurveTower(shape_from_dict(data["ambient"]), tuple(levels))


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, no trailing spaces, final newline."""
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# samples and polylines


def points_to_csv(rows: Sequence[Sequence[Fraction]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fraction_text(Fraction(v)) for v in row])
    return buf.getvalue()


def polyline_svg(points: Sequence[Point], shape: DyadicCompactum | None = None, size: int = 512) -> str:
    """SVG drawing of a planar polyline over the unit square, y pointing up."""
    if any(len(p) != 2 for p in points):
        raise ValueError("SVG output needs planar points")

    def fmt(v: Fraction) -> str:
        return f"{float(v) * size:.4f}".rstrip("0").rstrip(".")

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if shape is not None:
        s = shape.side
        for x, y in shape.cells:
            parts.append(
                f'<rect x="{fmt(x * s)}" y="{fmt(1 - (y + 1) * s)}" width="{fmt(s)}" '
                f'height="{fmt(s)}" fill="#dddddd"/>'
            )
    coords = " ".join(f"{fmt(x)},{fmt(1 - y)}" for x, y in points)
    parts.append(f'<polyline points="{coords}" fill="none" stroke="black" stroke-width="1"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


__all__ = [
    "ShapeFormatError",
    "chain_from_dict",
    "chain_to_dict",
    "code_from_dict",
    "code_to_dict",
    "dumps",
    "fraction_text",
    "load_shape",
    "parse_ascii",
    "parse_shape",
    "point_json",
    "points_to_csv",
    "polyline_svg",
    "shape_from_dict",
    "shape_to_dict",
    "to_ascii",
    "tower_from_dict",
    "tower_to_dict",
]
