"""Space-filling curves onto connected cubical compacta.

The curve is never materialized: a :class:`CurveTower` stores, per level
``n``, a chain of pieces of diameter < 2**-n together with parameter
breakpoints, and a parameter ``t`` is evaluated through the nested sections
of the tower.  Any point of the level-``n`` section is within ``2**(1-n)`` of
the limit curve.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .chains import (
    Chain,
    ChainError,
    RefinementCode,
    cover_small_peano,
    order_chain,
    refine_chain,
)
from .geometry import (
    DyadicCompactum,
    GeometryError,
    Point,
    at_level,
    canonical_point,
    cells_containing,
    components,
    format_point,
    hausdorff,
    point_distance,
    side,
    touches,
    union,
)


class CurveError(ValueError):
    pass


class PointOutsideError(CurveError):
    """A requested point is not in the closed union of the ambient compactum."""


@dataclass(frozen=True)
class ParamBreaks:
    """Increasing breakpoints ``numerators[i] / denominator`` from 0 to 1.

    A shared denominator keeps refinement and lookup in integer arithmetic;
    chains with hundreds of thousands of pieces make per-value fractions slow.
    """

    denominator: int
    numerators: tuple[int, ...]

    def __post_init__(self) -> None:
        nums = self.numerators
        if len(nums) < 2 or nums[0] != 0 or nums[-1] != self.denominator:
            raise CurveError("breakpoints must run from 0 to 1")

    @classmethod
    def uniform(cls, k: int) -> "ParamBreaks":
        if k < 1:
            raise CurveError("need at least one interval")
        return cls(k, tuple(range(k + 1)))

    @classmethod
    def from_values(cls, values: Sequence[Fraction]) -> "ParamBreaks":
        values = [Fraction(v) for v in values]
        den = math.lcm(*(v.denominator for v in values))
        nums = tuple(v.numerator * (den // v.denominator) for v in values)
        if any(a >= b for a, b in zip(nums, nums[1:])):
            raise CurveError("breakpoints must be strictly increasing")
        return cls(den, nums)

    def __len__(self) -> int:
        return len(self.numerators)

    def __getitem__(self, i: int) -> Fraction:
        return Fraction(self.numerators[i], self.denominator)

    @cached_property
    def values(self) -> tuple[Fraction, ...]:
        d = self.denominator
        return tuple(Fraction(n, d) for n in self.numerators)

    def locate(self, t: Fraction) -> tuple[int, bool]:
        """Index of the first breakpoint >= ``t`` and whether it equals ``t``."""
        key = Fraction(t) * self.denominator
        i = bisect_left(self.numerators, key)
        return i, i < len(self.numerators) and self.numerators[i] == key

    def refine(self, nu: Sequence[int]) -> "ParamBreaks":
        """Split interval ``i`` uniformly into ``nu[i]`` parts."""
        nums = self.numerators
        if len(nu) != len(nums) - 1:
            raise CurveError("block lengths do not match the number of intervals")
        if min(nu) < 1:
            raise CurveError("block lengths must be positive")
        scale = math.lcm(*set(nu))
        out = [0]
        for lo, hi, k in zip(nums, nums[1:], nu):
            step = (hi - lo) * scale // k
            base = lo * scale
            out.extend(base + j * step for j in range(1, k + 1))
        return ParamBreaks(self.denominator * scale, tuple(out))


@dataclass(frozen=True)
class TowerLevel:
    chain: Chain
    breaks: ParamBreaks
    code: RefinementCode

    @property
    def epsilon(self) -> Fraction:
        return self.chain.epsilon


@dataclass(frozen=True)
class CurveTower:
    ambient: DyadicCompactum
    levels: tuple[TowerLevel, ...]

    @property
    def max_level(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> TowerLevel:
        if not 1 <= n <= len(self.levels):
            raise CurveError(f"level {n} outside 1..{len(self.levels)}")
        return self.levels[n - 1]


def split(a: Fraction, b: Fraction, k: int) -> tuple[Fraction, ...]:
    """``k+1`` equally spaced exact values from ``a`` to ``b``."""
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise CurveError("split needs a < b")
    if k < 1:
        raise CurveError("split needs k >= 1")
    step = (b - a) / k
    return tuple(a + i * step for i in range(k)) + (b,)


def refine_breaks(breaks: Sequence[Fraction], nu: Sequence[int]) -> tuple[Fraction, ...]:
    """Split interval ``i`` of ``breaks`` uniformly into ``nu[i]`` parts."""
    if len(nu) != len(breaks) - 1:
        raise CurveError("block lengths do not match the number of intervals")
    out = [Fraction(0)]
    for lo, hi, k in zip(breaks, breaks[1:], nu):
        out.extend(split(lo, hi, k)[1:])
    return tuple(out)


def build_tower(X: DyadicCompactum, N: int) -> CurveTower:
    """Levels 1..N of the coded chain tower for a connected compactum ``X``."""
    if N < 1:
        raise CurveError("tower needs N >= 1")
    if len(components(X)) != 1:
        raise ChainError("compactum is not connected")
    half = Fraction(1, 2)
    p = canonical_point(X)
    chain = order_chain(cover_small_peano(X, half), p, p, half)
    code = RefinementCode((1,), (len(chain),))
    breaks = ParamBreaks.uniform(len(chain))
    levels = [TowerLevel(chain, breaks, code)]
    for n in range(2, N + 1):
        chain, code = refine_chain(chain, n)
        breaks = breaks.refine(code.nu)
        levels.append(TowerLevel(chain, breaks, code))
    return CurveTower(X, tuple(levels))


def section(tower: CurveTower, n: int, t: Fraction) -> DyadicCompactum:
    """Section of the level-``n`` product set at parameter ``t``."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise CurveError(f"parameter {t} outside [0, 1]")
    lv = tower.level(n)
    pieces = lv.chain.pieces
    i, exact = lv.breaks.locate(t)
    if exact:
        if i == 0:
            return pieces[0]
        if i == len(pieces):
            return pieces[-1]
        return union((pieces[i - 1], pieces[i]))
    return pieces[i - 1]


def evaluate(tower: CurveTower, t: Fraction, level: int | None = None) -> tuple[Point, Fraction]:
    """Approximate curve point at ``t`` and a sup-norm bound on its error."""
    n = tower.max_level if level is None else level
    return canonical_point(section(tower, n, t)), Fraction(2, 1 << n)


def event_parameters(tower: CurveTower, level: int | None = None) -> list[Fraction]:
    """Breakpoints interleaved with interval midpoints.

    Sections are constant on open intervals, so these parameters realize every
    value :func:`evaluate` can return at that level.
    """
    n = tower.max_level if level is None else level
    b = tower.level(n).breaks.values
    out = [b[0]]
    for lo, hi in zip(b, b[1:]):
        out.append((lo + hi) / 2)
        out.append(hi)
    return out


def sample(tower: CurveTower, step: Fraction, level: int | None = None) -> list[tuple[Fraction, Point]]:
    step = Fraction(step)
    count = int(1 / step)
    if count * step != 1:
        raise CurveError("step must divide 1")
    return [(i * step, evaluate(tower, i * step, level)[0]) for i in range(count + 1)]


@dataclass(frozen=True)
class AnchoredCurve:
    """The tower's curve reparametrized to start at ``a`` and end at ``b``.

    On [0, 1/3) it runs backwards from ``a`` to 0, on [1/3, 2/3] it traverses
    the whole curve, and on (2/3, 1] it runs backwards from 1 to ``b``.
    """

    tower: CurveTower
    a: Fraction
    b: Fraction
    x: Point
    y: Point

    def parameter(self, s: Fraction) -> Fraction:
        s = Fraction(s)
        if not 0 <= s <= 1:
            raise CurveError(f"parameter {s} outside [0, 1]")
        if s < Fraction(1, 3):
            return self.a - 3 * self.a * s
        if s <= Fraction(2, 3):
            return 3 * s - 1
        return 3 * self.b * s - 3 * s - 2 * self.b + 3

    def evaluate(self, s: Fraction) -> tuple[Point, Fraction]:
        return evaluate(self.tower, self.parameter(s))

    def inverse(self, t: Fraction, branch: int) -> Fraction:
        """Anchored parameter mapping to tower parameter ``t`` on ``branch`` 0, 1 or 2."""
        t = Fraction(t)
        if branch == 0:
            return (self.a - t) / (3 * self.a) if self.a else Fraction(0)
        if branch == 1:
            return (t + 1) / 3
        if self.b == 1:
            return Fraction(1)
        return (t - 3 + 2 * self.b) / (3 * (self.b - 1))


def first_parameter(tower: CurveTower, x: Point) -> Fraction:
    """Least breakpoint-grid parameter whose top-level section contains ``x``."""
    lv = tower.level(tower.max_level)
    for i, piece in enumerate(lv.chain.pieces):
        if cells_containing(piece, x):
            return lv.breaks[i]
    raise PointOutsideError(f"point {format_point(x)} is not in the compactum")


def anchor(tower: CurveTower, x: Point, y: Point) -> AnchoredCurve:
    for p in (x, y):
        if len(p) != tower.ambient.dim or not cells_containing(tower.ambient, p):
            raise PointOutsideError(f"point {format_point(p)} is not in the compactum")
    return AnchoredCurve(tower, first_parameter(tower, x), first_parameter(tower, y), x, y)


def preimage(tower: CurveTower, K: DyadicCompactum) -> list[tuple[Fraction, Fraction]]:
    """Merged parameter intervals whose top-level section meets ``K``."""
    if K.dim != tower.ambient.dim:
        raise GeometryError("dimension mismatch")
    lv = tower.level(tower.max_level)
    out: list[tuple[Fraction, Fraction]] = []
    b = lv.breaks.values
    for piece, lo, hi in zip(lv.chain.pieces, b, b[1:]):
        if not touches(piece, K):
            continue
        if out and out[-1][1] == lo:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def graph_set(tower: CurveTower, level: int | None = None, resolution: int | None = None) -> DyadicCompactum:
    """Outer cell approximation of the level-``n`` product set in [0,1]^(1+d).

    Each parameter interval is widened to the dyadic time cells it overlaps at
    ``resolution`` (default: the piece level), so the approximation stays
    within one time cell of the true set.
    """
    n = tower.max_level if level is None else level
    lv = tower.level(n)
    R = lv.chain.level if resolution is None else resolution
    scale = 1 << R
    cells = set()
    b = lv.breaks.values
    for piece, lo, hi in zip(lv.chain.pieces, b, b[1:]):
        j0 = (lo * scale).numerator // (lo * scale).denominator
        top = hi * scale
        j1 = -((-top.numerator) // top.denominator) - 1
        pc = at_level(piece, R).cells
        for j in range(j0, max(j0, j1) + 1):
            cells.update((j, *c) for c in pc)
    return DyadicCompactum(tower.ambient.dim + 1, R, tuple(sorted(cells)))


def graph_distance(f: CurveTower, g: CurveTower) -> Fraction:
    """Hausdorff distance between the cell approximations of the two graphs."""
    if f.ambient.dim != g.ambient.dim:
        raise GeometryError("dimension mismatch")
    if f.max_level != g.max_level:
        raise CurveError("towers have different depths")
    R = max(f.levels[-1].chain.level, g.levels[-1].chain.level)
    return hausdorff(graph_set(f, resolution=R), graph_set(g, resolution=R))


def sup_distance(f: CurveTower, g: CurveTower) -> Fraction:
    """Exact sup over t of the distance between the two evaluated curves.

    Both evaluations are constant on the open intervals of the merged
    breakpoint set, so breakpoints and interval midpoints suffice.
    """
    ts = sorted(set(f.levels[-1].breaks.values) | set(g.levels[-1].breaks.values))
    params = list(ts) + [(a + b) / 2 for a, b in zip(ts, ts[1:])]
    return max(point_distance(evaluate(f, t)[0], evaluate(g, t)[0]) for t in params)


def image_cells(tower: CurveTower, level: int | None = None) -> DyadicCompactum:
    n = tower.max_level if level is None else level
    return union(tower.level(n).chain.pieces)


__all__ = [
    "AnchoredCurve",
    "CurveError",
    "CurveTower",
    "ParamBreaks",
    "PointOutsideError",
    "TowerLevel",
    "anchor",
    "build_tower",
    "evaluate",
    "event_parameters",
    "first_parameter",
    "graph_distance",
    "graph_set",
    "image_cells",
    "preimage",
    "refine_breaks",
    "sample",
    "section",
    "side",
    "split",
    "sup_distance",
]
