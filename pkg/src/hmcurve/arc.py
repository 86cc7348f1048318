"""Simple paths between two points, extracted from a space-filling curve.

A sampled curve ``p_0, ..., p_M`` is reduced to a set of indices ``K`` such
that ``p`` at ``min K`` is the start value, ``p`` at ``max K`` is the end
value, and any two indices of ``K`` that are consecutive in ``K`` but not in
``0..M`` carry equal values.  Among such sets the one of least size (ties:
lexicographically least sorted list) is selected; walking its values and
dropping repeats gives a path that never revisits a point.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curve import AnchoredCurve, CurveError, PointOutsideError, anchor, build_tower, event_parameters
from .geometry import DyadicCompactum, Point, contains_point, format_point, point_distance


class ArcError(ValueError):
    pass


class DegenerateArcError(ArcError):
    """The two ends coincide, so there is no arc joining them."""


class InadmissibleError(ArcError):
    pass


IndexSet = tuple[int, ...]


@dataclass(frozen=True)
class DiscreteCurve:
    points: tuple[Point, ...]
    step: Fraction

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ArcError("a discrete curve needs at least two points")
        for i, (p, q) in enumerate(zip(self.points, self.points[1:])):
            if point_distance(p, q) > self.step:
                raise ArcError(f"points {i} and {i + 1} are farther apart than {self.step}")

    @property
    def M(self) -> int:
        return len(self.points) - 1


def whitney(K: Sequence[int], M: int) -> Fraction:
    """Size functional ``(|K| - 1) / M``: 0 on singletons, strictly monotone."""
    return Fraction(len(K) - 1, M)


def gap_pairs(K: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs of indices adjacent in ``K``."""
    ks = sorted(K)
    return list(zip(ks, ks[1:]))


def lambda_admissible(c: DiscreteCurve, K: Sequence[int]) -> bool:
    if not K:
        return False
    p = c.points
    return p[min(K)] == p[0] and p[max(K)] == p[-1]


def gamma_admissible(c: DiscreteCurve, K: Sequence[int]) -> bool:
    # index pairs with nothing strictly between them constrain nothing
    p = c.points
    return all(p[s] == p[t] for s, t in gap_pairs(K) if t - s > 1)


def admissible(c: DiscreteCurve, K: Sequence[int]) -> bool:
    return lambda_admissible(c, K) and gamma_admissible(c, K)


def minimal_admissible(c: DiscreteCurve) -> IndexSet:
    """Least admissible index set, ties broken lexicographically.

    Admissible sets are exactly the paths through the index graph with edges
    ``i -> i+1`` and ``i -> j`` whenever ``p_i == p_j``, starting at a copy of
    ``p_0`` and ending at a copy of ``p_M``.  Distances to the end are filled
    in right to left; the lexicographically least shortest path is then read
    off greedily.
    """
    p = c.points
    M = c.M
    if p[0] == p[M]:
        raise DegenerateArcError("start and end values coincide")
    dist = [0] * (M + 1)
    best: dict[Point, int] = {}
    for i in range(M, -1, -1):
        if p[i] == p[M]:
            dist[i] = 0
        else:
            d = dist[i + 1]
            if p[i] in best:
                d = min(d, best[p[i]])
            dist[i] = d + 1
        best[p[i]] = min(best.get(p[i], dist[i]), dist[i])

    where: dict[Point, list[int]] = {}
    for i, v in enumerate(p):
        where.setdefault(v, []).append(i)
    starts = where[p[0]]
    i = min(starts, key=lambda j: (dist[j], j))
    K = [i]
    while dist[i]:
        want = dist[i] - 1
        if dist[i + 1] == want:
            i += 1
        else:
            same = where[p[i]]
            i = next(j for j in same[bisect_right(same, i + 1) :] if dist[j] == want)
        K.append(i)
    return tuple(K)


def loop_erasure(c: DiscreteCurve) -> IndexSet:
    """Admissible index set by chronological loop erasure.

    Scanning left to right, a value seen again cuts the retained indices back
    to its previous occurrence; the result is then trimmed to start at the
    last retained copy of ``p_0`` and stop at the next copy of ``p_M``.
    Cheaper than :func:`minimal_admissible` and inclusion-minimal on simple
    inputs, but not always of least size.
    """
    p = c.points
    if p[0] == p[-1]:
        raise DegenerateArcError("start and end values coincide")
    kept: list[int] = []
    last: dict[Point, int] = {}
    for j, v in enumerate(p):
        if v in last:
            q = last[v]
            del kept[q + 1 :]
            if q > 0 and p[kept[q - 1]] == v:
                kept.pop()
            last = {p[r]: i for i, r in enumerate(kept)}
        kept.append(j)
        last[v] = len(kept) - 1
    lo = max(i for i, r in enumerate(kept) if p[r] == p[0])
    hi = next(i for i in range(lo, len(kept)) if p[kept[i]] == p[-1])
    return tuple(kept[lo : hi + 1])


def collapse(c: DiscreteCurve, K: Sequence[int]) -> DiscreteCurve:
    """Monotone quotient of ``c`` along ``K``, with repeated values merged.

    Before ``min K`` the curve is held at ``p_0``, after ``max K`` at ``p_M``,
    and across each gap of ``K`` at the common value of the gap's ends.
    """
    if not admissible(c, K):
        raise InadmissibleError("index set is not admissible")
    ks = sorted(K)
    p = c.points
    g: list[Point] = []
    prev = None
    for u in range(c.M + 1):
        if u < ks[0]:
            v = p[0]
        elif u > ks[-1]:
            v = p[-1]
        else:
            v = p[ks[bisect_right(ks, u) - 1]]
        if v != prev:
            g.append(v)
            prev = v
    return DiscreteCurve(tuple(g), c.step)


def sample_anchored(curve: AnchoredCurve) -> DiscreteCurve:
    """Anchored curve evaluated at every parameter where its value can change.

    Tower breakpoints and interval midpoints are pulled back through the
    three branches, so consecutive samples lie in one or two touching
    top-level pieces and are within ``2**(1-N)`` of each other.
    """
    tower = curve.tower
    ts = event_parameters(tower)
    params = [curve.inverse(t, 0) for t in reversed(ts) if t <= curve.a]
    params += [curve.inverse(t, 1) for t in ts]
    params += [curve.inverse(t, 2) for t in reversed(ts) if t >= curve.b]
    ordered = sorted(set(params))
    points = tuple(curve.evaluate(s)[0] for s in ordered)
    return DiscreteCurve(points, Fraction(2, 1 << tower.max_level))


def extract_arc(X: DyadicCompactum, x: Point, y: Point, N: int) -> DiscreteCurve:
    """Simple path in ``X`` from near ``x`` to near ``y`` at resolution ``N``."""
    x, y = tuple(Fraction(v) for v in x), tuple(Fraction(v) for v in y)
    if x == y:
        raise DegenerateArcError("the two ends coincide")
    for q in (x, y):
        if len(q) != X.dim or not contains_point(X, q):
            raise PointOutsideError(f"point {format_point(q)} is not in the compactum")
    curve = anchor(build_tower(X, N), x, y)
    c = sample_anchored(curve)
    return collapse(c, minimal_admissible(c))


__all__ = [
    "ArcError",
    "CurveError",
    "DegenerateArcError",
    "DiscreteCurve",
    "InadmissibleError",
    "admissible",
    "collapse",
    "extract_arc",
    "gamma_admissible",
    "gap_pairs",
    "lambda_admissible",
    "loop_erasure",
    "minimal_admissible",
    "sample_anchored",
    "whitney",
]
