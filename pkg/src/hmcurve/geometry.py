"""Exact dyadic-cell geometry in the unit cube [0,1]^d.

A compactum is a finite union of closed grid cells of side 2**-level.  All
distances use the sup-norm, so diameters and Hausdorff distances of such
unions are dyadic rationals and are returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import ndimage

Cell = tuple[int, ...]
Point = tuple[Fraction, ...]


class GeometryError(ValueError):
    """Raised on malformed shapes or incompatible operands."""


def side(level: int) -> Fraction:
    return Fraction(1, 1 << level)


@dataclass(frozen=True, eq=True)
class DyadicCompactum:
    """Nonempty set of level-``level`` cells in ``[0,1]^dim``.

    ``cells`` is deduplicated and sorted lexicographically; use
    :func:`compactum` to build one from arbitrary input.
    """

    dim: int
    level: int
    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise GeometryError("a compactum must contain at least one cell")

    @cached_property
    def cellset(self) -> frozenset[Cell]:
        return frozenset(self.cells)

    @cached_property
    def side(self) -> Fraction:
        return side(self.level)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell: object) -> bool:
        return cell in self.cellset

    def __hash__(self) -> int:
        return hash((self.dim, self.level, self.cells))


def compactum(dim: int, level: int, cells: Iterable[Sequence[int]]) -> DyadicCompactum:
    """Validate, deduplicate and sort ``cells`` into a :class:`DyadicCompactum`."""
    if dim < 1:
        raise GeometryError(f"dimension must be positive, got {dim}")
    if level < 0:
        raise GeometryError(f"level must be nonnegative, got {level}")
    bound = 1 << level
    out = set()
    for c in cells:
        c = tuple(int(v) for v in c)
        if len(c) != dim:
            raise GeometryError(f"cell {c} does not have {dim} coordinates")
        if any(v < 0 or v >= bound for v in c):
            raise GeometryError(f"cell {c} outside the level-{level} grid")
        out.add(c)
    return DyadicCompactum(dim, level, tuple(sorted(out)))


def _make(dim: int, level: int, cells: Iterable[Cell]) -> DyadicCompactum:
    # trusted constructor: cells already valid tuples
    return DyadicCompactum(dim, level, tuple(sorted(set(cells))))


def full_cube(dim: int, level: int = 0) -> DyadicCompactum:
    return DyadicCompactum(dim, level, tuple(itertools.product(range(1 << level), repeat=dim)))


def _check_dims(K: DyadicCompactum, L: DyadicCompactum) -> None:
    if K.dim != L.dim:
        raise GeometryError(f"dimension mismatch: {K.dim} vs {L.dim}")


# ---------------------------------------------------------------------------
# resolution changes


def subdivide(K: DyadicCompactum, target_level: int) -> DyadicCompactum:
    """Same closed union, expressed with cells at ``target_level``."""
    if target_level < K.level:
        raise GeometryError(f"cannot subdivide level {K.level} down to {target_level}")
    delta = target_level - K.level
    if delta == 0:
        return K
    k = 1 << delta
    offsets = list(itertools.product(range(k), repeat=K.dim))
    cells = [
        tuple((ci << delta) + oi for ci, oi in zip(c, o)) for c in K.cells for o in offsets
    ]
    # children of sorted parents in sorted offset order are not globally sorted
    return DyadicCompactum(K.dim, target_level, tuple(sorted(cells)))


def coarsen(K: DyadicCompactum, target_level: int) -> DyadicCompactum:
    """Set of level-``target_level`` ancestor cells (the smallest coarser cover)."""
    if target_level > K.level:
        raise GeometryError(f"cannot coarsen level {K.level} up to {target_level}")
    delta = K.level - target_level
    if delta == 0:
        return K
    return _make(K.dim, target_level, (tuple(v >> delta for v in c) for c in K.cells))


def at_level(K: DyadicCompactum, level: int) -> DyadicCompactum:
    return K if K.level == level else subdivide(K, level)


def union(pieces: Iterable[DyadicCompactum]) -> DyadicCompactum:
    pieces = list(pieces)
    if not pieces:
        raise GeometryError("union of no compacta")
    dim = pieces[0].dim
    level = max(p.level for p in pieces)
    cells: set[Cell] = set()
    for p in pieces:
        if p.dim != dim:
            raise GeometryError("dimension mismatch in union")
        cells.update(at_level(p, level).cells)
    return DyadicCompactum(dim, level, tuple(sorted(cells)))


def is_subset(K: DyadicCompactum, L: DyadicCompactum) -> bool:
    """Closed-union inclusion ``K ⊆ L``."""
    _check_dims(K, L)
    if K.level >= L.level:
        delta = K.level - L.level
        lcells = L.cellset
        return all(tuple(v >> delta for v in c) in lcells for c in K.cells)
    return subdivide(K, L.level).cellset <= L.cellset


def same_set(K: DyadicCompactum, L: DyadicCompactum) -> bool:
    _check_dims(K, L)
    level = max(K.level, L.level)
    return at_level(K, level).cells == at_level(L, level).cells


def translate(K: DyadicCompactum, offset: Sequence[int]) -> DyadicCompactum:
    return compactum(K.dim, K.level, (tuple(a + b for a, b in zip(c, offset)) for c in K.cells))


# ---------------------------------------------------------------------------
# metric quantities


def diam(K: DyadicCompactum) -> Fraction:
    """Sup-norm diameter of the closed union.

    For the sup-norm the diameter of a union of boxes is the largest
    coordinate extent, so no pairwise scan is needed.
    """
    extent = 0
    for j in range(K.dim):
        vals = [c[j] for c in K.cells]
        extent = max(extent, max(vals) - min(vals) + 1)
    return extent * K.side


def point_distance(p: Point, q: Point) -> Fraction:
    return max(abs(a - b) for a, b in zip(p, q))


def cell_box(c: Cell, level: int) -> tuple[Point, Point]:
    s = side(level)
    return tuple(v * s for v in c), tuple((v + 1) * s for v in c)


def point_to_cell_distance(p: Point, c: Cell, level: int) -> Fraction:
    s = side(level)
    best = Fraction(0)
    for pj, cj in zip(p, c):
        lo, hi = cj * s, (cj + 1) * s
        best = max(best, lo - pj, pj - hi)
    return best


def _cells_array(K: DyadicCompactum) -> np.ndarray:
    return np.asarray(K.cells, dtype=np.int64).reshape(len(K.cells), K.dim)


def _directed_halfcells(src: np.ndarray, dst: np.ndarray) -> int:
    """max over src cells of the chessboard distance to the nearest dst cell."""
    lo = np.minimum(src.min(axis=0), dst.min(axis=0))
    hi = np.maximum(src.max(axis=0), dst.max(axis=0))
    shape = tuple((hi - lo + 1).tolist())
    grid = np.ones(shape, dtype=bool)
    grid[tuple((dst - lo).T)] = False
    dist = ndimage.distance_transform_cdt(grid, metric="chessboard")
    return int(dist[tuple((src - lo).T)].max())


def hausdorff(K: DyadicCompactum, L: DyadicCompactum) -> Fraction:
    """Exact sup-norm Hausdorff distance between the closed unions.

    Every critical value of the covering radius lies on the half-cell grid of
    the common level, so the distance equals a chessboard distance transform
    computed one level finer, times half a cell.
    """
    _check_dims(K, L)
    level = max(K.level, L.level) + 1
    a = _cells_array(at_level(K, level))
    b = _cells_array(at_level(L, level))
    steps = max(_directed_halfcells(a, b), _directed_halfcells(b, a))
    return steps * side(level)


def hausdorff_points(points: Sequence[Point], K: DyadicCompactum) -> Fraction:
    """Exact sup-norm Hausdorff distance between a finite point set and ``K``.

    Points must have dyadic coordinates.  Both sides are scaled to integers on
    the half-cell grid of the finest level involved.
    """
    if not points:
        raise GeometryError("empty point set")
    if any(len(p) != K.dim for p in points):
        raise GeometryError("point dimension mismatch")
    level = K.level
    for p in points:
        for v in p:
            den = Fraction(v).denominator
            level = max(level, den.bit_length() - 1)
    half = level + 1
    scale = 1 << half
    P = np.asarray([[int(v * scale) for v in p] for p in points], dtype=np.int64)
    C = _cells_array(subdivide(K, half))
    # point -> compactum: distance to the nearest closed half-cell
    to_k = 0
    for start in range(0, len(P), 256):
        block = P[start:start + 256, None, :]
        gap = np.maximum(np.maximum(C[None] - block, block - (C[None] + 1)), 0)
        to_k = max(to_k, int(gap.max(axis=2).min(axis=1).max()))
    # compactum -> points: a half-cell lies in a point's closed cube of radius m
    # exactly when m reaches the farthest corner of the half-cell
    to_p = 0
    for start in range(0, len(C), 4096):
        block = C[start:start + 4096, None, :]
        far = np.maximum(np.abs(P[None] - block), np.abs(P[None] - block - 1))
        to_p = max(to_p, int(far.max(axis=2).min(axis=1).max()))
    return max(to_k, to_p) * side(half)


# ---------------------------------------------------------------------------
# adjacency


def _neighbour_offsets(dim: int) -> list[Cell]:
    return [o for o in itertools.product((-1, 0, 1), repeat=dim)]


def touches(K: DyadicCompactum, L: DyadicCompactum) -> bool:
    """Whether the closed unions intersect (corner contact counts)."""
    _check_dims(K, L)
    if K.level != L.level:
        fine, coarse = (K, L) if K.level > L.level else (L, K)
        return _touches_coarser(fine, coarse)
    a, b = K, L
    if len(a) > len(b):
        a, b = b, a
    if len(b) == 1:
        return max(abs(x - y) for x, y in zip(a.cells[0], b.cells[0])) <= 1
    bset = b.cellset
    offsets = _neighbour_offsets(K.dim)
    for c in a.cells:
        for o in offsets:
            if tuple(x + y for x, y in zip(c, o)) in bset:
                return True
    return False


def _touches_coarser(fine: DyadicCompactum, coarse: DyadicCompactum) -> bool:
    # coarse cell k spans [k*2^s, (k+1)*2^s] in fine units; it meets fine cell c
    # on an axis iff ceil(c / 2^s) - 1 <= k <= floor((c + 1) / 2^s)
    s = fine.level - coarse.level
    cset = coarse.cellset
    for c in fine.cells:
        ranges = [range(-((-v) >> s) - 1, ((v + 1) >> s) + 1) for v in c]
        if any(k in cset for k in itertools.product(*ranges)):
            return True
    return False


class Meet(NamedTuple):
    """Result of :func:`intersect`.

    ``cells`` are the shared cells when ``contact_only`` is false, otherwise
    the cells of the first operand that realize the lower-dimensional contact.
    ``point`` is a canonical point lying in both closed unions.
    """

    cells: DyadicCompactum
    contact_only: bool
    point: Point


def intersect(K: DyadicCompactum, L: DyadicCompactum) -> Meet:
    _check_dims(K, L)
    level = max(K.level, L.level)
    a, b = at_level(K, level), at_level(L, level)
    shared = a.cellset & b.cellset
    if shared:
        cells = DyadicCompactum(K.dim, level, tuple(sorted(shared)))
        return Meet(cells, False, canonical_point(cells))
    bset = b.cellset
    offsets = _neighbour_offsets(K.dim)
    contact: set[Cell] = set()
    best: tuple[int, ...] | None = None
    for c in a.cells:
        for o in offsets:
            nb = tuple(x + y for x, y in zip(c, o))
            if nb in bset:
                contact.add(c)
                # lowest corner of the closed face shared by c and nb
                corner = tuple(max(x, y) for x, y in zip(c, nb))
                if best is None or corner < best:
                    best = corner
    if best is None:
        raise GeometryError("intersect called on disjoint compacta")
    s = side(level)
    cells = DyadicCompactum(K.dim, level, tuple(sorted(contact)))
    return Meet(cells, True, tuple(v * s for v in best))


def components(K: DyadicCompactum) -> list[DyadicCompactum]:
    """Connected components, ordered by their lexicographically least cell."""
    if len(K.cells) == 1:
        return [K]
    cellset = K.cellset
    offsets = [o for o in _neighbour_offsets(K.dim) if any(o)]
    seen: set[Cell] = set()
    out = []
    for start in K.cells:
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        comp = []
        while stack:
            c = stack.pop()
            comp.append(c)
            for o in offsets:
                nb = tuple(x + y for x, y in zip(c, o))
                if nb in cellset and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        out.append(DyadicCompactum(K.dim, K.level, tuple(sorted(comp))))
    return out


def is_connected(K: DyadicCompactum) -> bool:
    return len(components(K)) == 1


# ---------------------------------------------------------------------------
# selectors and points


def canonical_point(K: DyadicCompactum) -> Point:
    """Lexicographically least corner of the lexicographically least cell."""
    s = K.side
    return tuple(v * s for v in K.cells[0])


def corners(K: DyadicCompactum) -> list[Point]:
    s = K.side
    pts = {
        tuple(v + o for v, o in zip(c, off))
        for c in K.cells
        for off in itertools.product((0, 1), repeat=K.dim)
    }
    return [tuple(v * s for v in p) for p in sorted(pts)]


def argmin_select(K: DyadicCompactum, score: Callable[[Point], object]) -> Point:
    """Corner of ``K`` minimizing ``score``; ties go to the lexicographically least."""
    best = None
    best_key = None
    for p in corners(K):
        key = score(p)
        if best is None or key < best_key:
            best, best_key = p, key
    assert best is not None
    return best


def cells_containing(K: DyadicCompactum, p: Point) -> list[Cell]:
    """Cells of ``K`` whose closed box contains ``p`` (empty if outside)."""
    if len(p) != K.dim:
        raise GeometryError("point dimension mismatch")
    scale = 1 << K.level
    choices = []
    for v in p:
        if v < 0 or v > 1:
            return []
        x = Fraction(v) * scale
        fl = x.numerator // x.denominator
        opts = [fl]
        if x.denominator == 1:
            opts.append(fl - 1)
        choices.append([o for o in opts if 0 <= o < scale])
    cellset = K.cellset
    return [c for c in itertools.product(*choices) if c in cellset]


def contains_point(K: DyadicCompactum, p: Point) -> bool:
    return bool(cells_containing(K, p))


def parse_dyadic(text: str) -> Fraction:
    """Parse ``"p/2^q"``, ``"p/q"`` or an integer into an exact dyadic rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        den = den.strip()
        if den.startswith("2^"):
            value = Fraction(int(num), 1 << int(den[2:]))
        else:
            value = Fraction(int(num), int(den))
    else:
        value = Fraction(int(text))
    d = value.denominator
    if d & (d - 1):
        raise GeometryError(f"{text!r} is not a dyadic rational")
    return value


def format_dyadic(value: Fraction) -> str:
    value = Fraction(value)
    q = value.denominator.bit_length() - 1
    return f"{value.numerator}/2^{q}"


def format_point(p: Point) -> str:
    return "(" + ", ".join(str(Fraction(v)) for v in p) + ")"


def parse_point(text: str) -> Point:
    return tuple(parse_dyadic(part) for part in text.split(","))
