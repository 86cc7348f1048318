import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hmcurve.cantor import (
    Branch,
    CodingError,
    Leaf,
    PrefixTree,
    code,
    leaves,
    phi_cell,
    reindex,
    reindex_image,
    structure_violations,
    tree_from_dict,
    tree_to_dict,
    truncate,
    walk,
)
from hmcurve.geometry import coarsen, compactum, full_cube
from coding_checks import coding_failures
from oracles import cell_of_box, codes_by_enumeration, cylinder_box
from strategies import compacta


class TestPhiCell:
    def test_zeros(self):
        assert phi_cell([0, 0, 0, 0], 2, 1) == (0, 0)

    def test_leading_digit_of_first_axis(self):
        assert phi_cell([1, 0, 0, 0], 2, 1) == (1, 0)

    def test_ones(self):
        assert phi_cell([1, 1, 1, 1], 2, 1) == (1, 1)

    def test_padding_ignored(self):
        assert phi_cell([0, 1, 0, 1], 2, 1) == (0, 0)

    def test_errors(self):
        with pytest.raises(CodingError):
            phi_cell([0, 0, 0], 2, 1)
        with pytest.raises(CodingError):
            phi_cell([0, 2, 0, 0], 2, 1)

    @pytest.mark.parametrize("dim, level", [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1)])
    def test_matches_cylinder_boxes(self, dim, level):
        for bits in itertools.product((0, 1), repeat=2 * dim * level):
            box = cylinder_box(bits, dim, level)
            assert phi_cell(bits, dim, level) == cell_of_box(box, level)


class TestCode:
    def test_full_cube_is_complete(self):
        tree = code(full_cube(2, 2))
        assert tree.leaf_count == 2**8
        assert tree.max_branching == 8

    def test_single_cell(self):
        for dim, level in [(1, 2), (2, 1), (2, 2), (3, 1)]:
            K = compactum(dim, level, [(0,) * dim])
            assert code(K).leaf_count == 2 ** (dim * level)

    def test_depth(self):
        assert code(compactum(3, 2, [(0, 1, 3)])).depth == 12

    @given(compacta(max_dim=2, max_level=2, max_cells=6))
    def test_leaves_are_enumerated_codes(self, K):
        tree = code(K)
        assert {path for path, _ in leaves(tree)} == codes_by_enumeration(K)
        assert not structure_violations(tree, K)

    @given(compacta(max_dim=3, max_level=2, max_cells=8))
    def test_every_internal_node_has_children(self, K):
        def ok(node):
            if isinstance(node, Leaf):
                return True
            kids = node.children()
            return 1 <= len(kids) <= 2 and all(ok(c) for _, c in kids)

        assert ok(code(K).root)

    def test_padding_shares_subtrees(self):
        root = code(full_cube(1, 1)).root
        assert isinstance(root, Branch)
        assert root.zero is not None and root.one is not None
        pad0 = root.zero
        assert pad0.zero is pad0.one


class TestStructureViolations:
    def test_foreign_leaf(self):
        K = compactum(1, 1, [(0,)])
        bad = PrefixTree(1, 1, Branch(Branch(Leaf((1,)), Leaf((1,))), None))
        assert any("not in the compactum" in v for v in structure_violations(bad, K))

    def test_missing_cell(self):
        K = compactum(1, 1, [(0,), (1,)])
        tree = code(compactum(1, 1, [(0,)]))
        assert any("owns no leaf" in v for v in structure_violations(tree, K))

    def test_short_leaf(self):
        K = compactum(1, 1, [(0,)])
        bad = PrefixTree(1, 1, Branch(Leaf((0,)), None))
        assert any("depth" in v for v in structure_violations(bad, K))


class TestReindex:
    def test_complete_tree_is_phi(self):
        tree = code(full_cube(2, 1))
        for bits in itertools.product((0, 1), repeat=4):
            assert reindex(tree, bits) == phi_cell(bits, 2, 1)

    def test_single_cell_constant(self):
        K = compactum(2, 2, [(2, 1)])
        tree = code(K)
        assert {reindex(tree, b) for b in itertools.product((0, 1), repeat=8)} == {(2, 1)}

    def test_surplus_bits_ignored(self):
        tree = code(compactum(2, 1, [(0, 1), (1, 1)]))
        assert reindex(tree, [1] * 4) == reindex(tree, [1] * 40)

    def test_short_input(self):
        with pytest.raises(CodingError):
            reindex(code(full_cube(2, 1)), [0])

    def test_walk_path_is_leaf_path(self):
        tree = code(compactum(2, 2, [(0, 0), (3, 3)]))
        paths = {p for p, _ in leaves(tree)}
        for bits in itertools.product((0, 1), repeat=5):
            path, cell = walk(tree, bits)
            assert path in paths and phi_cell(path, 2, 2) == cell

    @given(compacta(max_dim=2, max_level=2, max_cells=6))
    def test_onto_leaves_and_cells(self, K):
        tree = code(K)
        paths, cells = reindex_image(tree)
        assert paths == {p for p, _ in leaves(tree)}
        assert cells == K.cellset

    @given(compacta(dims=[1, 2], max_level=2, max_cells=6))
    def test_full_check(self, K):
        assert coding_failures(K) == []


class TestTruncate:
    @given(compacta(max_dim=2, max_level=3, max_cells=8), st.data())
    def test_matches_coding_of_parents(self, K, data):
        level = data.draw(st.integers(0, K.level))
        cut = truncate(code(K), level)
        if level == 0:
            assert cut.depth == 0 and cut.root == Leaf((0,) * K.dim)
        else:
            assert cut == code(coarsen(K, level))

    def test_bad_level(self):
        with pytest.raises(CodingError):
            truncate(code(full_cube(1, 1)), 2)


class TestSerialization:
    @given(compacta(max_dim=2, max_level=2, max_cells=6))
    def test_round_trip(self, K):
        tree = code(K)
        back = tree_from_dict(tree_to_dict(tree))
        assert back == tree
        assert list(leaves(back)) == list(leaves(tree))

    def test_bad_node(self):
        with pytest.raises(CodingError):
            tree_from_dict({"dim": 1, "level": 1, "tree": {"2": {"cell": [0]}}})


def test_all_plane_compacta_at_level_one():
    cells = list(itertools.product(range(2), repeat=2))
    for mask in range(1, 16):
        K = compactum(2, 1, [c for i, c in enumerate(cells) if mask >> i & 1])
        assert coding_failures(K) == []


def test_random_level_three():
    rng = random.Random(5)
    cells = list(itertools.product(range(8), repeat=2))
    for _ in range(10):
        K = compactum(2, 3, rng.sample(cells, rng.randint(1, 64)))
        assert coding_failures(K) == []
