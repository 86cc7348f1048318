"""Checks of the structural guarantees of towers, arcs and codings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arc import extract_arc
from .cantor import code, structure_violations
from .chains import chain_violations, refinement_violations
from .curve import CurveTower, build_tower, evaluate, sample, section
from .geometry import DyadicCompactum, canonical_point, contains_point, diam, hausdorff_points, is_subset, point_distance


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def dyadic_grid(exponent: int) -> list[Fraction]:
    n = 1 << exponent
    return [Fraction(i, n) for i in range(n + 1)]


def nestedness_violations(tower: CurveTower, ts: Sequence[Fraction]) -> list[tuple[int, Fraction]]:
    """(n, t) with section(n+1, t) not inside section(n, t)."""
    out = []
    for t in ts:
        prev = section(tower, 1, t)
        for n in range(2, tower.max_level + 1):
            cur = section(tower, n, t)
            if not is_subset(cur, prev):
                out.append((n - 1, t))
            prev = cur
    return out


def decay_violations(tower: CurveTower, ts: Sequence[Fraction]) -> list[tuple[int, Fraction]]:
    """(n, t) with diam(section(n, t)) > 2**(1-n)."""
    return [
        (n, t)
        for n in range(1, tower.max_level + 1)
        for t in ts
        if diam(section(tower, n, t)) > Fraction(2, 1 << n)
    ]


def consistency_violations(tower: CurveTower, ts: Sequence[Fraction]) -> list[tuple[int, int, Fraction]]:
    """(n, m, t) with evaluations at levels n < m farther apart than 2**(1-n)."""
    out = []
    N = tower.max_level
    for t in ts:
        pts = [evaluate(tower, t, n)[0] for n in range(1, N + 1)]
        for n in range(1, N + 1):
            for m in range(n + 1, N + 1):
                if point_distance(pts[n - 1], pts[m - 1]) > Fraction(2, 1 << n):
                    out.append((n, m, t))
    return out


def surjectivity_gap(tower: CurveTower) -> Fraction:
    """Hausdorff distance from the curve sampled at step 2**-(N+2) to the shape."""
    N = tower.max_level
    pts = [p for _, p in sample(tower, Fraction(1, 1 << (N + 2)))]
    return hausdorff_points(pts, tower.ambient)


def chain_report(tower: CurveTower) -> list[str]:
    out = []
    X = tower.ambient
    for n, lv in enumerate(tower.levels, start=1):
        out += [f"level {n}: {v}" for v in chain_violations(lv.chain, X)]
        if n > 1:
            prev = tower.levels[n - 2].chain
            out += [f"level {n}: {v}" for v in refinement_violations(prev, lv.chain, lv.code)]
    return out


def _fmt(p: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(v) for v in p) + ")"


def _far_corner(X: DyadicCompactum) -> tuple[Fraction, ...]:
    s = X.side
    return tuple((v + 1) * s for v in X.cells[-1])


def invariant_suite(X: DyadicCompactum, N: int, grid_exponent: int = 10) -> list[CheckResult]:
    """Run every check on ``X`` with a depth-``N`` tower."""
    tower = build_tower(X, N)
    ts = dyadic_grid(grid_exponent)
    results = []

    bad = chain_report(tower)
    results.append(CheckResult("chains", not bad, f"{len(bad)} violations over levels 1..{N}"))

    bad_nest = nestedness_violations(tower, ts)
    results.append(CheckResult("nestedness", not bad_nest, f"{len(bad_nest)} violations on {len(ts)} parameters"))

    bad_decay = decay_violations(tower, ts)
    results.append(CheckResult("section diameter", not bad_decay, f"{len(bad_decay)} violations"))

    bad_eval = consistency_violations(tower, ts)
    results.append(CheckResult("evaluation consistency", not bad_eval, f"{len(bad_eval)} violations"))

    gap = surjectivity_gap(tower)
    bound = Fraction(4, 1 << N)
    results.append(CheckResult("surjectivity", gap <= bound, f"hausdorff {gap} vs bound {bound}"))

    x, y = canonical_point(X), _far_corner(X)
    path = extract_arc(X, x, y, N)
    pts = path.points
    h = Fraction(2, 1 << N)
    arc_ok = (
        len(set(pts)) == len(pts)
        and all(contains_point(X, p) for p in pts)
        and point_distance(pts[0], x) <= h
        and point_distance(pts[-1], y) <= h
    )
    results.append(CheckResult("arc", arc_ok, f"{len(pts)} points from {_fmt(x)} to {_fmt(y)}"))

    tree = code(X)
    bad_tree = structure_violations(tree, X)
    results.append(CheckResult("cantor coding", not bad_tree, f"{tree.leaf_count} leaves, depth {tree.depth}"))
    return results


__all__ = [
    "CheckResult",
    "chain_report",
    "consistency_violations",
    "decay_violations",
    "dyadic_grid",
    "invariant_suite",
    "nestedness_violations",
    "surjectivity_gap",
]
