"""Command-line front end.

    hmcurve curve    --input SHAPE --level N [--format json|csv|svg] [--out PATH]
    hmcurve arc      --input SHAPE --level N --x P --y P [--format ...] [--out PATH]
    hmcurve cantor   --input SHAPE [--level R] [--out PATH]
    hmcurve validate --input SHAPE --level N

Points are comma-separated dyadic rationals such as ``1/2^3,5/2^4``.
Exit codes: 0 success, 1 failed validation, 2 unusable input, 3 disconnected
shape, 4 coinciding arc ends, 5 arc end outside the shape.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import io as shapeio
from .arc import DegenerateArcError, extract_arc
from .cantor import code, tree_to_dict
from .chains import ChainError
from .curve import PointOutsideError, build_tower, evaluate, sample
from .geometry import DyadicCompactum, GeometryError, Point, at_level, format_dyadic, is_connected, parse_point
from .validation import invariant_suite

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_DISCONNECTED = 3
EXIT_SAME_ENDS = 4
EXIT_OUTSIDE = 5


class JobError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class JobConfig:
    command: str
    input: Path
    dim: int | None = None
    level: int | None = None
    out: Path | None = None
    format: str = "json"
    x: Point | None = None
    y: Point | None = None


def _load(config: JobConfig) -> DyadicCompactum:
    try:
        X = shapeio.load_shape(config.input)
    except shapeio.ShapeFormatError as exc:
        raise JobError(EXIT_PARSE, str(exc)) from exc
    if config.dim is not None and config.dim != X.dim:
        raise JobError(EXIT_PARSE, f"shape has dimension {X.dim}, not {config.dim}")
    return X


def _need_level(config: JobConfig) -> int:
    if config.level is None or config.level < 1:
        raise JobError(EXIT_PARSE, "--level N with N >= 1 is required")
    return config.level


def _need_connected(X: DyadicCompactum) -> None:
    if not is_connected(X):
        raise JobError(EXIT_DISCONNECTED, "shape is not connected")


def _run_curve(config: JobConfig, X: DyadicCompactum) -> str:
    N = _need_level(config)
    _need_connected(X)
    tower = build_tower(X, N)
    samples = sample(tower, Fraction(1, 1 << (N + 2)))
    if config.format == "svg" and X.dim == 2:
        return shapeio.polyline_svg([p for _, p in samples], X)
    if config.format in ("csv", "svg"):
        header = ["t"] + [f"p{j + 1}" for j in range(X.dim)]
        return shapeio.points_to_csv([(t, *p) for t, p in samples], header)
    data = shapeio.tower_to_dict(tower)
    data["samples"] = [
        {"t": shapeio.fraction_text(t), "point": shapeio.point_json(p)} for t, p in samples
    ]
    data["error_bound"] = format_dyadic(evaluate(tower, Fraction(0))[1])
    return shapeio.dumps(data)


def _run_arc(config: JobConfig, X: DyadicCompactum) -> str:
    N = _need_level(config)
    if config.x is None or config.y is None:
        raise JobError(EXIT_PARSE, "arc needs --x and --y")
    if len(config.x) != X.dim or len(config.y) != X.dim:
        raise JobError(EXIT_PARSE, f"points must have {X.dim} coordinates")
    if config.x == config.y:
        raise JobError(EXIT_SAME_ENDS, "the two ends coincide")
    _need_connected(X)
    try:
        path = extract_arc(X, config.x, config.y, N)
    except DegenerateArcError as exc:
        raise JobError(EXIT_SAME_ENDS, str(exc)) from exc
    except PointOutsideError as exc:
        raise JobError(EXIT_OUTSIDE, str(exc)) from exc
    points = list(path.points)
    if config.format == "svg" and X.dim == 2:
        return shapeio.polyline_svg(points, X)
    if config.format in ("csv", "svg"):
        return shapeio.points_to_csv(points, [f"p{j + 1}" for j in range(X.dim)])
    return shapeio.dumps({"points": [shapeio.point_json(p) for p in points]})


def _run_cantor(config: JobConfig, X: DyadicCompactum) -> str:
    if config.level is not None:
        if config.level < X.level:
            raise JobError(EXIT_PARSE, f"--level {config.level} is coarser than the shape")
        X = at_level(X, config.level)
    tree = code(X)
    # keep standard output clean when it carries the tree itself
    report = sys.stdout if config.out is not None else sys.stderr
    print(f"leaves: {tree.leaf_count}", file=report)
    print(f"depth: {tree.depth}", file=report)
    return shapeio.dumps(tree_to_dict(tree))


def _run_validate(config: JobConfig, X: DyadicCompactum) -> tuple[str, bool]:
    N = _need_level(config)
    _need_connected(X)
    results = invariant_suite(X, N)
    lines = [f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}" for r in results]
    return "\n".join(lines) + "\n", all(r.ok for r in results)


def run(config: JobConfig) -> int:
    """Execute one job; returns the process exit status."""
    try:
        X = _load(config)
        ok = True
        if config.command == "curve":
            text = _run_curve(config, X)
        elif config.command == "arc":
            text = _run_arc(config, X)
        elif config.command == "cantor":
            text = _run_cantor(config, X)
        elif config.command == "validate":
            text, ok = _run_validate(config, X)
        else:
            raise JobError(EXIT_PARSE, f"unknown command {config.command!r}")
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    if config.out is None or config.command == "validate":
        sys.stdout.write(text)
    if config.out is not None:
        config.out.write_text(text)
    return EXIT_OK if ok else EXIT_INVALID


def _point_arg(text: str) -> Point:
    try:
        return parse_point(text)
    except (GeometryError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a dyadic point: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmcurve", description="Space-filling curves and arcs on cubical shapes.")
    parser.add_argument("command", choices=["curve", "arc", "cantor", "validate"])
    parser.add_argument("--input", required=True, type=Path, help="shape file (JSON or ASCII grid)")
    parser.add_argument("--dim", type=int, help="expected dimension of the shape")
    parser.add_argument("--level", type=int, help="tower depth N (cantor: coding level)")
    parser.add_argument("--x", type=_point_arg, help="arc start, e.g. 0,1/2^3")
    parser.add_argument("--y", type=_point_arg, help="arc end")
    parser.add_argument("--out", type=Path, help="output file (default: standard output)")
    parser.add_argument("--format", choices=["json", "csv", "svg"], default="json")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = JobConfig(
        command=args.command,
        input=args.input,
        dim=args.dim,
        level=args.level,
        out=args.out,
        format=args.format,
        x=args.x,
        y=args.y,
    )
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
