"""Covers by small connected pieces, chain ordering and coded chain refinement.

A chain is an ordered cover of a compactum by connected pieces of diameter
below ``epsilon`` in which consecutive pieces meet.  Refining a chain replaces
every piece by an ordered chain of smaller pieces covering it; the block
start indices ``mu`` and block lengths ``nu`` record that correspondence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage

from .geometry import (
    DyadicCompactum,
    GeometryError,
    Point,
    at_level,
    canonical_point,
    cells_containing,
    components,
    diam,
    intersect,
    is_subset,
    same_set,
    side,
    subdivide,
    touches,
    union,
)


class ChainError(ValueError):
    """Raised when a chain operation's precondition does not hold."""


@dataclass(frozen=True)
class Chain:
    pieces: tuple[DyadicCompactum, ...]
    epsilon: Fraction

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ChainError("a chain needs at least one piece")
        lv = {(p.dim, p.level) for p in self.pieces}
        if len(lv) != 1:
            raise ChainError("chain pieces must share dimension and level")

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def level(self) -> int:
        return self.pieces[0].level

    @property
    def dim(self) -> int:
        return self.pieces[0].dim


@dataclass(frozen=True)
class RefinementCode:
    """Block starts ``mu`` (1-based, ``mu[0] == 1``) and block lengths ``nu``."""

    mu: tuple[int, ...]
    nu: tuple[int, ...]

    @classmethod
    def from_lengths(cls, lengths: Sequence[int]) -> "RefinementCode":
        mu = tuple(1 + s for s in itertools.accumulate([0, *lengths[:-1]]))
        return cls(mu, tuple(lengths))

    @property
    def fine_length(self) -> int:
        return sum(self.nu)


def nu_from_mu(mu: Sequence[int], fine_length: int) -> tuple[int, ...]:
    """Block lengths by differencing block starts; the last block runs to the end."""
    return tuple(b - a for a, b in zip(mu, mu[1:])) + (fine_length + 1 - mu[-1],)


@dataclass(frozen=True)
class AccretionParams:
    base: DyadicCompactum
    epsilon: Fraction
    ambient: DyadicCompactum


# ---------------------------------------------------------------------------
# covers


def _resolve_level(K: DyadicCompactum, eps: Fraction) -> int:
    """Smallest level >= K.level whose cell side is below ``eps``."""
    r = K.level
    while side(r) >= eps:
        r += 1
    return r


def _max_width(s: Fraction, bound: Fraction) -> int:
    """Largest w with w*s < bound (0 if even one cell is too wide)."""
    q = bound / s
    w = q.numerator // q.denominator
    return w - 1 if w * s == bound else w


def _require_connected(X: DyadicCompactum) -> None:
    if len(components(X)) != 1:
        raise ChainError("compactum is not connected")


def cover_small(X: DyadicCompactum, eps: Fraction) -> list[DyadicCompactum]:
    """Cover a connected compactum by connected pieces of diameter < ``eps``.

    Greedy: the lexicographically least uncovered cell seeds a window of
    ``w`` cells per axis (``w * side < eps``) anchored at the seed; the
    seed's component among the uncovered cells of that window becomes the
    next piece, so the pieces partition the cells.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ChainError("eps must be positive")
    _require_connected(X)
    if diam(X) < eps:
        return [X]
    Y = subdivide(X, _resolve_level(X, eps))
    w = _max_width(Y.side, eps)
    if w == 1:
        return [DyadicCompactum(Y.dim, Y.level, (c,)) for c in Y.cells]
    steps = [o for o in itertools.product((-1, 0, 1), repeat=Y.dim) if any(o)]
    uncovered = set(Y.cells)
    pieces = []
    for seed in Y.cells:
        if seed not in uncovered:
            continue
        hi = tuple(v + w for v in seed)
        uncovered.discard(seed)
        comp = [seed]
        stack = [seed]
        while stack:
            c = stack.pop()
            for o in steps:
                nb = tuple(a + b for a, b in zip(c, o))
                if nb in uncovered and all(lo <= v < h for lo, v, h in zip(seed, nb, hi)):
                    uncovered.discard(nb)
                    comp.append(nb)
                    stack.append(nb)
        pieces.append(DyadicCompactum(Y.dim, Y.level, tuple(sorted(comp))))
    return pieces


def _reach(X: DyadicCompactum, previous: set, w: int) -> set:
    """Cells lying in some connected D ⊆ X of extent <= w cells touching ``previous``."""
    cellset = X.cellset
    offsets = list(itertools.product((-1, 0, 1), repeat=X.dim))
    touch = {
        nb
        for c in previous
        for nb in (tuple(a + b for a, b in zip(c, o)) for o in offsets)
        if nb in cellset
    }
    if w == 1 or not touch:
        return touch
    arr = np.asarray(X.cells, dtype=np.int64)
    lo = arr.min(axis=0)
    grid = np.zeros(tuple((arr.max(axis=0) - lo + 1).tolist()), dtype=bool)
    grid[tuple((arr - lo).T)] = True
    tmask = np.zeros_like(grid)
    t_arr = np.asarray(sorted(touch), dtype=np.int64) - lo
    tmask[tuple(t_arr.T)] = True
    out = np.zeros_like(grid)
    structure = np.ones((3,) * X.dim, dtype=bool)
    starts = {
        tuple(max(0, v - k) for v, k in zip(t, ks))
        for t in t_arr.tolist()
        for ks in itertools.product(range(w), repeat=X.dim)
    }
    for st in sorted(starts):
        sl = tuple(slice(a, a + w) for a in st)
        labels, count = ndimage.label(grid[sl], structure=structure)
        if count == 0:
            continue
        hit = np.unique(labels[tmask[sl]])
        hit = hit[hit > 0]
        if hit.size:
            out[sl] |= np.isin(labels, hit)
    found = np.argwhere(out) + lo
    return {tuple(int(v) for v in row) for row in found}


def s_accretion(params: AccretionParams) -> DyadicCompactum:
    """Cells reachable from the base through connected sets of shrinking size.

    Step ``i`` admits connected subsets of the ambient space with diameter
    below ``epsilon * 2**-i`` touching anything reached at step ``i-1``; the
    schedule stops once that bound no longer exceeds one cell side.
    """
    X, A, eps = params.ambient, params.base, Fraction(params.epsilon)
    if A.dim != X.dim:
        raise ChainError("dimension mismatch")
    if not is_subset(A, X):
        raise ChainError("base is not contained in the ambient compactum")
    level = max(X.level, A.level)
    Xs, As = at_level(X, level), at_level(A, level)
    s = Xs.side
    result = set(As.cells)
    frontier = set(As.cells)
    i = 1
    while True:
        w = _max_width(s, eps / (1 << i))
        if w == 0:
            break
        frontier = _reach(Xs, frontier, w)
        result |= frontier
        i += 1
    return DyadicCompactum(X.dim, level, tuple(sorted(result)))


def cover_small_peano(X: DyadicCompactum, eps: Fraction) -> list[DyadicCompactum]:
    """Cover by pieces of diameter < ``eps``, each grown by accretion at ``eps/3``."""
    eps = Fraction(eps)
    third = eps / 3
    seeds = cover_small(X, third)
    level = max(p.level for p in seeds)
    ambient = at_level(X, level)
    return [s_accretion(AccretionParams(at_level(p, level), third, ambient)) for p in seeds]


# ---------------------------------------------------------------------------
# ordering


def touching_graph(pieces: Sequence[DyadicCompactum]) -> list[list[int]]:
    """Adjacency lists (sorted indices) of the 'closed pieces intersect' relation."""
    level = max(p.level for p in pieces)
    dim = pieces[0].dim
    owners: dict = {}
    fine = [at_level(p, level) for p in pieces]
    for i, p in enumerate(fine):
        for c in p.cells:
            owners.setdefault(c, []).append(i)
    offsets = list(itertools.product((-1, 0, 1), repeat=dim))
    adj = []
    for i, p in enumerate(fine):
        nbrs = set()
        for c in p.cells:
            for o in offsets:
                for j in owners.get(tuple(a + b for a, b in zip(c, o)), ()):
                    nbrs.add(j)
        nbrs.discard(i)
        adj.append(sorted(nbrs))
    return adj


def order_chain(
    pieces: Sequence[DyadicCompactum], x: Point, y: Point, epsilon: Fraction
) -> Chain:
    """Arrange ``pieces`` into a walk from a piece holding ``x`` to one holding ``y``.

    Depth-first search over the touching graph from the lexicographically
    least piece containing ``x``; neighbours are tried in lexicographic order
    except that the target piece is deferred.  The walk visits the DFS tree in
    preorder with the subtree holding the target last, backtracking along tree
    edges only until the current piece meets the next one, and finally climbs
    to the target.  Every tree edge is retraced at most once, so the result
    has at most ``2*len(pieces) - 1`` terms.
    """
    pieces = list(pieces)
    if not pieces:
        raise ChainError("no pieces to order")
    n = len(pieces)
    rank = sorted(range(n), key=lambda i: (pieces[i].cells, i))
    pos = {i: r for r, i in enumerate(rank)}

    def holding(p: Point) -> int:
        for i in rank:
            if cells_containing(pieces[i], p):
                return i
        raise ChainError(f"point {p} is not covered by the pieces")

    root, target = holding(x), holding(y)
    adj = touching_graph(pieces)

    parent = {root: None}
    kids: dict[int, list[int]] = {root: []}
    stack = [(root, iter(sorted(adj[root], key=lambda j: (j == target, pos[j]))))]
    while stack:
        v, it = stack[-1]
        for c in it:
            if c not in parent:
                parent[c] = v
                kids[c] = []
                kids[v].append(c)
                stack.append((c, iter(sorted(adj[c], key=lambda j: (j == target, pos[j])))))
                break
        else:
            stack.pop()
    if len(parent) != n:
        raise ChainError("union of pieces is not connected")

    on_path = set()
    v = target
    while v is not None:
        on_path.add(v)
        v = parent[v]
    preorder = []
    todo = [root]
    while todo:
        v = todo.pop()
        preorder.append(v)
        # stack order: the path child is pushed first so it is visited last
        todo.extend([c for c in kids[v] if c in on_path])
        todo.extend(reversed([c for c in kids[v] if c not in on_path]))

    nbrs = [set(a) for a in adj]
    walk = [root]
    for c in preorder[1:]:
        cur, stop = walk[-1], parent[c]
        while cur != stop and c not in nbrs[cur]:
            cur = parent[cur]
            walk.append(cur)
        walk.append(c)
    cur = walk[-1]
    while cur != target and target not in nbrs[cur]:
        cur = parent[cur]
        walk.append(cur)
    if cur != target:
        walk.append(target)
    return Chain(tuple(pieces[i] for i in walk), Fraction(epsilon))


# ---------------------------------------------------------------------------
# refinement


def _normal_form(K: DyadicCompactum) -> tuple[tuple, tuple[int, ...]]:
    lo = tuple(min(c[j] for c in K.cells) for j in range(K.dim))
    rel = tuple(tuple(a - b for a, b in zip(c, lo)) for c in K.cells)
    return (K.dim, K.level, rel), lo


class _Refiner:
    """Per-level memo of covers and orderings, keyed up to translation.

    Covers and orderings commute with grid translations that keep a piece
    inside the cube, so identical shapes are processed once.
    """

    def __init__(self, eps: Fraction) -> None:
        self.eps = eps
        self.covers: dict = {}
        self.orders: dict = {}

    def block(self, K: DyadicCompactum, start: Point, end: Point) -> list[DyadicCompactum]:
        key, lo = _normal_form(K)
        shift = tuple(v * K.side for v in lo)
        cover = self.covers.get(key)
        if cover is None:
            base = DyadicCompactum(K.dim, K.level, key[2])
            cover = cover_small_peano(base, self.eps)
            self.covers[key] = cover
        rs = tuple(a - b for a, b in zip(start, shift))
        re = tuple(a - b for a, b in zip(end, shift))
        okey = (key, rs, re)
        order = self.orders.get(okey)
        if order is None:
            chain = order_chain(cover, rs, re, self.eps)
            index = {p: i for i, p in enumerate(cover)}
            order = [index[p] for p in chain.pieces]
            self.orders[okey] = order
        level = cover[0].level
        off = tuple(v << (level - K.level) for v in lo)
        if not any(off):
            return [cover[i] for i in order]
        moved = [
            DyadicCompactum(p.dim, p.level, tuple(tuple(a + b for a, b in zip(c, off)) for c in p.cells))
            for p in cover
        ]
        return [moved[i] for i in order]


def refine_chain(coarse: Chain, n: int) -> tuple[Chain, RefinementCode]:
    """Refine ``coarse`` into a chain of pieces with diameter < 2**-n.

    Piece ``K_i`` is covered by small Peano pieces which are ordered from a
    point of ``K_{i-1} ∩ K_i`` to a point of ``K_i ∩ K_{i+1}`` (the first and
    last blocks start and end at the canonical points of the end pieces).
    """
    if n < 1:
        raise ChainError("refinement level must be >= 1")
    eps = Fraction(1, 1 << n)
    K = coarse.pieces
    k = len(K)
    refiner = _Refiner(eps)
    if k == 1:
        X = K[0]
        cover = cover_small_peano(X, eps)
        p = canonical_point(X)
        fine = order_chain(cover, p, p, eps)
        return fine, RefinementCode((1,), (len(fine),))
    meets = []
    for a, b in zip(K, K[1:]):
        if not touches(a, b):
            raise ChainError("consecutive coarse pieces do not meet")
        meets.append(intersect(a, b).point)
    blocks: list[list[DyadicCompactum]] = []
    for i, piece in enumerate(K):
        start = canonical_point(piece) if i == 0 else meets[i - 1]
        end = canonical_point(piece) if i == k - 1 else meets[i]
        blocks.append(refiner.block(piece, start, end))
    level = max(p.level for b in blocks for p in b)
    pieces = tuple(at_level(p, level) for b in blocks for p in b)
    code = RefinementCode.from_lengths([len(b) for b in blocks])
    return Chain(pieces, eps), code


# ---------------------------------------------------------------------------
# validation


def chain_violations(chain: Chain, X: DyadicCompactum) -> list[str]:
    """Violations of the weak-chain clauses: union, diameter, connectedness, contact."""
    out = []
    if not same_set(union(chain.pieces), X):
        out.append("union of pieces differs from the ambient compactum")
    # pieces repeat along a chain, so each distinct piece and pair is checked once
    bad_diam, bad_conn = set(), set()
    for p in set(chain.pieces):
        if diam(p) >= chain.epsilon:
            bad_diam.add(p)
        if len(components(p)) != 1:
            bad_conn.add(p)
    for i, p in enumerate(chain.pieces):
        if p in bad_diam:
            out.append(f"piece {i + 1} has diameter {diam(p)} >= {chain.epsilon}")
        if p in bad_conn:
            out.append(f"piece {i + 1} is not connected")
    pairs = set(zip(chain.pieces, chain.pieces[1:]))
    apart = {pq for pq in pairs if not touches(*pq)}
    for i in range(1, len(chain.pieces)):
        if (chain.pieces[i - 1], chain.pieces[i]) in apart:
            out.append(f"pieces {i} and {i + 1} do not meet")
    return out


def refinement_violations(coarse: Chain, fine: Chain, code: RefinementCode) -> list[str]:
    """Violations of 'fine refines coarse as coded by mu'."""
    out = []
    mu, nu = code.mu, code.nu
    k, l = len(coarse), len(fine)
    if len(mu) != k or len(nu) != k:
        out.append(f"code has {len(mu)} starts for {k} coarse pieces")
        return out
    if mu[0] != 1 or any(a >= b for a, b in zip(mu, mu[1:])) or mu[-1] > l:
        out.append("block starts are not 1 = j1 < ... < jk <= l")
        return out
    if tuple(nu) != nu_from_mu(mu, l):
        out.append("block lengths disagree with differenced block starts")
    bounds = list(mu) + [l + 1]
    for i in range(k):
        block = fine.pieces[bounds[i] - 1 : bounds[i + 1] - 1]
        if not same_set(union(block), coarse.pieces[i]):
            out.append(f"block {i + 1} does not union to coarse piece {i + 1}")
    return out


__all__ = [
    "AccretionParams",
    "Chain",
    "ChainError",
    "GeometryError",
    "RefinementCode",
    "chain_violations",
    "cover_small",
    "cover_small_peano",
    "nu_from_mu",
    "order_chain",
    "refine_chain",
    "refinement_violations",
    "s_accretion",
    "touching_graph",
]
