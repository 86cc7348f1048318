"""Coding cubical compacta by binary sequences.

A bit string of length ``2*d*r`` names a level-``r`` cell: even positions
carry the binary digits of the coordinates, interleaved across axes, and odd
positions are padding that the map ignores.  Padding keeps every retained
prefix extendable in two ways, so the set of codes of a compactum has no
isolated points.

The codes of a compactum ``K`` form a prefix tree.  Reading a tree with
:func:`reindex` consumes an input bit only where the tree branches, which
turns it into a map from all bit strings onto the cells of ``K``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator, Sequence, Union

from .geometry import Cell, DyadicCompactum


class CodingError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    cell: Cell


@dataclass(frozen=True)
class Branch:
    """Internal node; a missing child is ``None``.  Subtrees may be shared."""

    zero: "Node | None"
    one: "Node | None"

    def children(self) -> list[tuple[int, "Node"]]:
        return [(b, c) for b, c in ((0, self.zero), (1, self.one)) if c is not None]


Node = Union[Leaf, Branch]


@dataclass(frozen=True)
class PrefixTree:
    dim: int
    level: int
    root: Node

    @property
    def depth(self) -> int:
        return 2 * self.dim * self.level

    @cached_property
    def leaf_count(self) -> int:
        memo: dict[int, int] = {}

        def count(node: Node) -> int:
            key = id(node)
            if key not in memo:
                if isinstance(node, Leaf):
                    memo[key] = 1
                else:
                    memo[key] = sum(count(c) for _, c in node.children())
            return memo[key]

        return count(self.root)

    @cached_property
    def max_branching(self) -> int:
        """Largest number of two-way nodes on a root-to-leaf path."""
        memo: dict[int, int] = {}

        def go(node: Node) -> int:
            key = id(node)
            if key not in memo:
                if isinstance(node, Leaf):
                    memo[key] = 0
                else:
                    kids = node.children()
                    memo[key] = (len(kids) == 2) + max(go(c) for _, c in kids)
            return memo[key]

        return go(self.root)


def _digit_slot(position: int, dim: int) -> tuple[int, int] | None:
    """(digit index k, axis j) fed by an even bit position; None for padding."""
    if position % 2:
        return None
    k, j = divmod(position // 2, dim)
    return k, j


def phi_cell(bits: Sequence[int], dim: int, level: int) -> Cell:
    """Level-``level`` cell named by ``2*dim*level`` interleaved bits."""
    if len(bits) != 2 * dim * level:
        raise CodingError(f"expected {2 * dim * level} bits, got {len(bits)}")
    idx = [0] * dim
    for pos, bit in enumerate(bits):
        if bit not in (0, 1):
            raise CodingError(f"bit {pos} is {bit!r}")
        slot = _digit_slot(pos, dim)
        if slot is not None and bit:
            k, j = slot
            idx[j] |= 1 << (level - 1 - k)
    return tuple(idx)


def code(K: DyadicCompactum) -> PrefixTree:
    """Prefix tree of all bit strings whose cell lies in ``K``.

    At a padding position both children are the same subtree, so the tree
    has at most ``len(K) * dim * level`` distinct internal nodes.
    """
    d, r = K.dim, K.level
    depth = 2 * d * r

    def build(pos: int, cells: list[Cell]) -> Node:
        if pos == depth:
            return Leaf(cells[0])
        slot = _digit_slot(pos, d)
        if slot is None:
            sub = build(pos + 1, cells)
            return Branch(sub, sub)
        k, j = slot
        shift = r - 1 - k
        zero = [c for c in cells if not (c[j] >> shift) & 1]
        one = [c for c in cells if (c[j] >> shift) & 1]
        return Branch(
            build(pos + 1, zero) if zero else None,
            build(pos + 1, one) if one else None,
        )

    return PrefixTree(d, r, build(0, list(K.cells)))


def walk(tree: PrefixTree, bits: Sequence[int]) -> tuple[tuple[int, ...], Cell]:
    """Tree path and leaf cell reached by reading ``bits`` at branching nodes."""
    node = tree.root
    path = []
    it = iter(bits)
    while type(node) is Branch:
        zero, one = node.zero, node.one
        if zero is None:
            b, node = 1, one
        elif one is None:
            b, node = 0, zero
        else:
            b = next(it, None)
            if b is None:
                raise CodingError("input ran out before a leaf was reached")
            if b not in (0, 1):
                raise CodingError(f"bit {b!r} is not 0 or 1")
            node = one if b else zero
        path.append(b)
    return tuple(path), node.cell


def reindex(tree: PrefixTree, bits: Sequence[int]) -> Cell:
    """Cell reached by reading ``bits``; surplus bits are ignored."""
    node = tree.root
    it = iter(bits)
    while type(node) is Branch:
        zero, one = node.zero, node.one
        if zero is None:
            node = one
        elif one is None:
            node = zero
        else:
            b = next(it, None)
            if b is None:
                raise CodingError("input ran out before a leaf was reached")
            if b not in (0, 1):
                raise CodingError(f"bit {b!r} is not 0 or 1")
            node = one if b else zero
    return node.cell


def leaves(tree: PrefixTree) -> Iterator[tuple[tuple[int, ...], Cell]]:
    """Every root-to-leaf path with its cell, in lexicographic path order."""
    stack: list[tuple[Node, tuple[int, ...]]] = [(tree.root, ())]
    while stack:
        node, path = stack.pop()
        if isinstance(node, Leaf):
            yield path, node.cell
            continue
        for b, c in reversed(node.children()):
            stack.append((c, path + (b,)))


def truncate(tree: PrefixTree, level: int) -> PrefixTree:
    """The tree cut at depth ``2*dim*level``, leaves relabelled by parent cells."""
    if not 0 <= level <= tree.level:
        raise CodingError(f"cannot truncate a level-{tree.level} tree to level {level}")
    depth = 2 * tree.dim * level
    shift = tree.level - level
    memo: dict[tuple[int, int], Node] = {}

    def any_leaf(node: Node) -> Cell:
        while isinstance(node, Branch):
            node = node.children()[0][1]
        return node.cell

    def cut(node: Node, pos: int) -> Node:
        key = (id(node), pos)
        if key not in memo:
            if pos == depth:
                memo[key] = Leaf(tuple(v >> shift for v in any_leaf(node)))
            else:
                assert isinstance(node, Branch)
                z = cut(node.zero, pos + 1) if node.zero is not None else None
                o = cut(node.one, pos + 1) if node.one is not None else None
                memo[key] = Branch(z, o)
        return memo[key]

    return PrefixTree(tree.dim, level, cut(tree.root, 0))


def structure_violations(tree: PrefixTree, K: DyadicCompactum) -> list[str]:
    """Checks that every leaf sits at full depth in ``K`` and every cell of ``K`` owns one."""
    out = []
    seen = set()
    for path, cell in leaves(tree):
        if len(path) != tree.depth:
            out.append(f"leaf at depth {len(path)} instead of {tree.depth}")
        elif phi_cell(path, tree.dim, tree.level) != cell:
            out.append(f"leaf {path} is labelled {cell}, not the cell its bits name")
        if cell not in K.cellset:
            out.append(f"leaf cell {cell} is not in the compactum")
        seen.add(cell)
    for c in K.cells:
        if c not in seen:
            out.append(f"cell {c} owns no leaf")
    return out


def reindex_image(tree: PrefixTree) -> tuple[set[tuple[int, ...]], set[Cell]]:
    """Leaf paths and cells reached by all inputs of the tree's branching depth."""
    n = tree.max_branching
    paths, cells = set(), set()
    for bits in itertools.product((0, 1), repeat=n):
        path, cell = walk(tree, bits)
        paths.add(path)
        cells.add(cell)
    return paths, cells


# ---------------------------------------------------------------------------
# serialization


def tree_to_dict(tree: PrefixTree) -> dict[str, Any]:
    def enc(node: Node) -> dict[str, Any]:
        if isinstance(node, Leaf):
            return {"cell": list(node.cell)}
        return {str(b): enc(c) for b, c in node.children()}

    return {"dim": tree.dim, "level": tree.level, "depth": tree.depth, "tree": enc(tree.root)}


def tree_from_dict(data: dict[str, Any]) -> PrefixTree:
    def dec(obj: dict[str, Any]) -> Node:
        if "cell" in obj:
            return Leaf(tuple(obj["cell"]))
        if not set(obj) <= {"0", "1"} or not obj:
            raise CodingError("tree node must have keys '0' and/or '1'")
        return Branch(
            dec(obj["0"]) if "0" in obj else None,
            dec(obj["1"]) if "1" in obj else None,
        )

    return PrefixTree(data["dim"], data["level"], dec(data["tree"]))


__all__ = [
    "Branch",
    "CodingError",
    "Leaf",
    "PrefixTree",
    "code",
    "leaves",
    "phi_cell",
    "reindex",
    "reindex_image",
    "structure_violations",
    "tree_from_dict",
    "tree_to_dict",
    "truncate",
    "walk",
]
