import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hmcurve.chains import ChainError, chain_violations, refinement_violations
from hmcurve.curve import (
    CurveError,
    ParamBreaks,
    PointOutsideError,
    anchor,
    build_tower,
    evaluate,
    event_parameters,
    graph_distance,
    image_cells,
    preimage,
    refine_breaks,
    section,
    split,
    sup_distance,
)
from hmcurve.geometry import (
    cells_containing,
    compactum,
    contains_point,
    diam,
    full_cube,
    is_subset,
    point_distance,
    same_set,
    touches,
    translate,
    union,
)
from hmcurve.validation import (
    consistency_violations,
    decay_violations,
    dyadic_grid,
    nestedness_violations,
    surjectivity_gap,
)
from oracles import point_set_distance
from strategies import connected_compacta, grow_connected

L_SHAPE = compactum(2, 1, [(0, 0), (1, 0), (0, 1)])


@pytest.fixture(scope="module")
def l_tower():
    return build_tower(L_SHAPE, 4)


class TestSplit:
    def test_quarters(self):
        assert split(0, 1, 4) == (0, F(1, 4), F(1, 2), F(3, 4), 1)

    def test_single(self):
        assert split(0, 1, 1) == (0, 1)

    def test_half(self):
        assert split(F(1, 2), 1, 2) == (F(1, 2), F(3, 4), 1)

    @pytest.mark.parametrize("a, b, k", [(1, 1, 2), (1, 0, 2), (0, 1, 0)])
    def test_errors(self, a, b, k):
        with pytest.raises(CurveError):
            split(a, b, k)

    def test_thirds_are_exact(self):
        assert split(0, 1, 3)[1] == F(1, 3)


class TestParamBreaks:
    def test_uniform(self):
        assert ParamBreaks.uniform(4).values == split(0, 1, 4)

    def test_locate(self):
        b = ParamBreaks.uniform(4)
        assert b.locate(F(1, 4)) == (1, True)
        assert b.locate(F(3, 10)) == (2, False)
        assert b.locate(0) == (0, True)

    def test_rejects_bad_ends(self):
        with pytest.raises(CurveError):
            ParamBreaks(4, (0, 1, 3))
        with pytest.raises(CurveError):
            ParamBreaks.from_values([0, F(1, 2), F(1, 2), 1])

    def test_refine_rejects_mismatch(self):
        with pytest.raises(CurveError):
            ParamBreaks.uniform(2).refine([1])
        with pytest.raises(CurveError):
            ParamBreaks.uniform(2).refine([1, 0])

    @given(st.lists(st.integers(1, 7), min_size=1, max_size=6), st.data())
    def test_refine_matches_fraction_splitting(self, first, data):
        b = ParamBreaks.uniform(len(first)).refine(first)
        m = sum(first)
        nu = data.draw(st.lists(st.integers(1, 5), min_size=m, max_size=m))
        ref = refine_breaks(refine_breaks(split(0, 1, len(first)), first), nu)
        assert b.refine(nu).values == ref
        assert ParamBreaks.from_values(ref).values == ref


class TestBuildTower:
    def test_unit_interval(self):
        X = full_cube(1, 0)
        tower = build_tower(X, 1)
        lv = tower.level(1)
        assert all(diam(p) < F(1, 2) for p in lv.chain.pieces)
        assert same_set(union(lv.chain.pieces), X)
        assert lv.breaks.values == split(0, 1, len(lv.chain))

    def test_errors(self):
        with pytest.raises(CurveError):
            build_tower(L_SHAPE, 0)
        with pytest.raises(ChainError):
            build_tower(compactum(2, 2, [(0, 0), (3, 3)]), 2)

    def test_level_lookup(self, l_tower):
        with pytest.raises(CurveError):
            l_tower.level(5)

    def test_breakpoint_counts(self, l_tower):
        for lv in l_tower.levels:
            assert len(lv.breaks) == len(lv.chain) + 1

    def test_levels_refine(self, l_tower):
        X = l_tower.ambient
        for n, lv in enumerate(l_tower.levels, start=1):
            assert lv.epsilon == F(1, 1 << n)
            assert not chain_violations(lv.chain, X)
            assert same_set(image_cells(l_tower, n), X)
        for prev, lv in zip(l_tower.levels, l_tower.levels[1:]):
            assert not refinement_violations(prev.chain, lv.chain, lv.code)
            # each coarse interval is cut into nu blocks
            fine = set(lv.breaks.values)
            assert set(prev.breaks.values) <= fine

    def test_nested_on_fine_grid(self, l_tower):
        ts = dyadic_grid(10)
        assert nestedness_violations(l_tower, ts) == []
        assert decay_violations(l_tower, ts) == []

    @given(connected_compacta(max_level=3, max_cells=8), st.integers(1, 3))
    def test_random_shapes(self, X, N):
        tower = build_tower(X, N)
        ts = dyadic_grid(7)
        assert nestedness_violations(tower, ts) == []
        assert decay_violations(tower, ts) == []
        assert consistency_violations(tower, ts[::5]) == []


class TestSection:
    def test_cases(self, l_tower):
        lv = l_tower.level(3)
        K = lv.chain.pieces
        b = lv.breaks
        assert section(l_tower, 3, 0) == K[0]
        assert section(l_tower, 3, 1) == K[-1]
        assert section(l_tower, 3, b[1]) == union((K[0], K[1]))
        assert section(l_tower, 3, (b[1] + b[2]) / 2) == K[1]

    def test_outside_range(self, l_tower):
        with pytest.raises(CurveError):
            section(l_tower, 1, F(-1, 4))
        with pytest.raises(CurveError):
            section(l_tower, 1, F(5, 4))


class TestEvaluate:
    def test_error_bound(self, l_tower):
        p, err = evaluate(l_tower, F(1, 3))
        assert err == F(2, 16)
        assert contains_point(L_SHAPE, p)

    def test_start_in_first_piece(self, l_tower):
        p, _ = evaluate(l_tower, 0)
        assert cells_containing(l_tower.levels[-1].chain.pieces[0], p)

    def test_surjective_up_to_tolerance(self, l_tower):
        assert surjectivity_gap(l_tower) <= F(4, 16)

    def test_modulus_of_continuity(self, l_tower):
        b = l_tower.levels[-1].breaks.values
        gap = min(hi - lo for lo, hi in zip(b, b[1:]))
        rng = random.Random(7)
        for _ in range(300):
            t = F(rng.randrange(10**6), 10**6)
            s = min(F(1), t + gap * F(rng.randrange(1000), 1001))
            d = point_distance(evaluate(l_tower, t)[0], evaluate(l_tower, s)[0])
            assert d <= 3 * F(2, 16)


class TestAnchor:
    def test_branch_ends(self, l_tower):
        x, y = (F(1, 4), F(3, 4)), (F(1), F(0))
        c = anchor(l_tower, x, y)
        assert c.parameter(F(1, 3)) == 0 and c.parameter(F(2, 3)) == 1
        assert c.evaluate(0) == evaluate(l_tower, c.a)
        assert c.evaluate(1) == evaluate(l_tower, c.b)
        assert c.evaluate(F(1, 3)) == evaluate(l_tower, 0)
        h = F(2, 16)
        assert point_distance(c.evaluate(0)[0], x) <= h
        assert point_distance(c.evaluate(1)[0], y) <= h

    def test_degenerate(self, l_tower):
        x = evaluate(l_tower, 0)[0]
        c = anchor(l_tower, x, x)
        assert c.a == c.b == 0
        assert c.evaluate(0) == c.evaluate(1) == evaluate(l_tower, 0)

    def test_outside(self, l_tower):
        with pytest.raises(PointOutsideError):
            anchor(l_tower, (F(1), F(1)), (F(0), F(0)))
        with pytest.raises(PointOutsideError):
            anchor(l_tower, (F(0),), (F(0), F(0)))

    @given(st.integers(0, 2), st.integers(0, 64))
    def test_inverse_round_trip(self, branch, k):
        tower = build_tower(L_SHAPE, 2)
        c = anchor(tower, (F(1, 4), F(3, 4)), (F(1), F(1, 2)))
        t = F(k, 64)
        lo, hi = {0: (0, c.a), 1: (0, 1), 2: (c.b, 1)}[branch]
        if lo <= t <= hi and not (branch == 0 and c.a == 0) and not (branch == 2 and c.b == 1):
            assert c.parameter(c.inverse(t, branch)) == t

    def test_image_preserved(self, l_tower):
        c = anchor(l_tower, (F(1, 4), F(3, 4)), (F(1), F(0)))
        grid = [F(i, 3 * 4096) for i in range(3 * 4096 + 1)]
        coarse = {section(l_tower, 2, c.parameter(s)) for s in grid}
        assert set(l_tower.level(2).chain.pieces) <= coarse
        assert same_set(union(coarse), L_SHAPE)
        fine = {section(l_tower, 4, c.parameter(c.inverse(t, 1))) for t in event_parameters(l_tower)}
        assert same_set(union(fine), L_SHAPE)


class TestPreimage:
    def test_whole(self, l_tower):
        assert preimage(l_tower, L_SHAPE) == [(0, 1)]

    def test_disjoint(self, l_tower):
        assert preimage(l_tower, compactum(2, 3, [(7, 7)])) == []

    def test_outer_approximation(self, l_tower):
        K = compactum(2, 2, [(3, 0)])
        ivs = preimage(l_tower, K)
        assert ivs
        for t in dyadic_grid(9):
            p = evaluate(l_tower, t)[0]
            if contains_point(K, p) or touches(section(l_tower, 4, t), K):
                assert any(lo <= t <= hi for lo, hi in ivs)

    def test_near_points_not_always_covered(self, l_tower):
        """Evaluations within 2**(1-N) of K can come from sections that miss K."""
        K = compactum(2, 2, [(3, 0)])
        ivs = preimage(l_tower, K)
        h = F(2, 16)
        near = [t for t in dyadic_grid(9) if point_set_distance(evaluate(l_tower, t)[0], K) <= h]
        assert any(not any(lo <= t <= hi for lo, hi in ivs) for t in near)


class TestGraphDistance:
    def test_identical(self, l_tower):
        assert graph_distance(l_tower, l_tower) == 0
        assert sup_distance(l_tower, l_tower) == 0

    def test_mismatch(self, l_tower):
        with pytest.raises(CurveError):
            graph_distance(l_tower, build_tower(L_SHAPE, 2))
        with pytest.raises(Exception):
            graph_distance(l_tower, build_tower(full_cube(1, 1), 4))

    def test_translated_shape(self):
        X = compactum(2, 2, [(0, 0), (1, 0), (0, 1)])
        N = 3
        f, g = build_tower(X, N), build_tower(translate(X, (1, 0)), N)
        assert graph_distance(f, g) <= X.side + F(2, 1 << N)

    def test_bound_on_random_pairs(self):
        rng = random.Random(11)
        for _ in range(5):
            X = grow_connected(rng, 2, 2, rng.randint(1, 6))
            Y = grow_connected(rng, 2, 2, rng.randint(1, 6))
            N = 3
            f, g = build_tower(X, N), build_tower(Y, N)
            assert graph_distance(f, g) <= sup_distance(f, g) + F(2, 1 << N)


def test_event_parameters_cover_all_values(l_tower):
    ts = event_parameters(l_tower)
    seen = {evaluate(l_tower, t)[0] for t in ts}
    fine = {evaluate(l_tower, t)[0] for t in dyadic_grid(11)}
    assert fine <= seen
    assert is_subset(union([l_tower.levels[-1].chain.pieces[0]]), L_SHAPE)
