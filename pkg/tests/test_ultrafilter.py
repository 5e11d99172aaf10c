import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracomb.errors import CapExceeded, GroundMismatch, OverflowBeyondTruncation
from ultracomb.modelcheck import check_model
from ultracomb.ultrafilter import (
    GroundSet,
    ProductSpace,
    SubsetMask,
    all_subsets,
    axiom_violation,
    compose,
    definitional_member,
    image,
    image_table,
    member,
    principal,
    principal_point,
    principal_table,
    project,
    pseudo_sum,
    pseudo_sum_table,
    star_extension,
    star_table,
    tensor,
    tensor_table,
)


def brute_tensor_member(u, v, ni, nj, bits):
    # {i : X_i in V} in U, written with sets
    X = {(i, j) for i in range(ni) for j in range(nj) if (bits >> (i * nj + j)) & 1}
    large = {i for i in range(ni) if (i, v) in X}
    return u in large


class TestPrincipal:
    def test_membership_examples(self):
        I = GroundSet(3)
        U = principal(I, 1)
        assert member(U, SubsetMask.from_elements(I, [1, 2]))
        assert not member(U, SubsetMask.from_elements(I, [0, 2]))

    def test_one_point_ground(self):
        I = GroundSet(1)
        U = principal(I, 0)
        assert member(U, SubsetMask.full(I))
        assert not member(U, SubsetMask.empty(I))

    def test_member_examples_on_four(self):
        I = GroundSet(4)
        U = principal(I, 2)
        S = SubsetMask.from_elements(I, [0, 2])
        assert member(U, S)
        assert not member(U, SubsetMask.empty(I))
        assert member(U, S) != member(U, S.complement())

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            principal(GroundSet(3), 3)

    def test_ground_mismatch(self):
        with pytest.raises(GroundMismatch):
            member(principal(GroundSet(3), 0), SubsetMask.full(GroundSet(4)))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_tables_satisfy_axioms(self, n):
        for p in range(n):
            assert axiom_violation(principal_table(n, p), n) is None

    def test_axiom_checker_rejects_non_ultrafilters(self):
        n = 3
        xs = all_subsets(n)
        # the filter generated by {0, 1} is not ultra
        table = (xs & 0b011) == 0b011
        assert axiom_violation(table, n) is not None
        assert axiom_violation(np.zeros(1 << n, dtype=bool), n) is not None

    @given(st.integers(1, 6), st.data())
    def test_measure_is_additive(self, n, data):
        I = GroundSet(n)
        U = principal(I, data.draw(st.integers(0, n - 1)))
        a = data.draw(st.integers(0, (1 << n) - 1))
        b = data.draw(st.integers(0, (1 << n) - 1)) & ~a
        A, B = SubsetMask(I, a), SubsetMask(I, b)
        assert U.measure(A | B) == U.measure(A) + U.measure(B)


class TestImage:
    def test_constant_map(self):
        I, J = GroundSet(4), GroundSet(3)
        for p in range(4):
            assert image(lambda x: 2, principal(I, p), J).point == 2

    def test_identity(self):
        I = GroundSet(4)
        U = principal(I, 3)
        assert image(lambda x: x, U, I) == U

    def test_mod_two_against_preimage_definition(self):
        I, J = GroundSet(4), GroundSet(2)
        U = principal(I, 3)
        f = [x % 2 for x in range(4)]
        V = image(f, U, J)
        assert V.point == 1
        for y in range(4):
            pre = {x for x in range(4) if (y >> f[x]) & 1}
            assert member(V, SubsetMask(J, y)) == (3 in pre)
        assert np.array_equal(image_table(U.table(), f, 2), V.table())

    def test_partial_map(self):
        with pytest.raises(ValueError):
            image([0, None, 1], principal(GroundSet(3), 0), GroundSet(2))

    @given(st.data())
    def test_functoriality(self, data):
        a, b, c = (data.draw(st.integers(1, 4)) for _ in range(3))
        g = data.draw(st.lists(st.integers(0, b - 1), min_size=a, max_size=a))
        f = data.draw(st.lists(st.integers(0, c - 1), min_size=b, max_size=b))
        U = principal(GroundSet(a), data.draw(st.integers(0, a - 1)))
        B, C = GroundSet(b), GroundSet(c)
        assert image(compose(f, g), U, C) == image(f, image(g, U, B), C)


class TestTensor:
    def test_example(self):
        I, J = GroundSet(2), GroundSet(2)
        W = tensor(principal(I, 1), principal(J, 0))
        assert W.coords == (1, 0)

    @pytest.mark.parametrize("ni,nj", [(2, 2), (2, 3), (3, 2)])
    def test_definition_exhaustive(self, ni, nj):
        I, J = GroundSet(ni), GroundSet(nj)
        for u, v in itertools.product(range(ni), range(nj)):
            U, V = principal(I, u), principal(J, v)
            W = tensor(U, V)
            table = tensor_table(U.table(), ni, V.table(), nj)
            assert np.array_equal(table, W.table())
            for bits in range(1 << (ni * nj)):
                X = SubsetMask(W.space, bits)
                expect = brute_tensor_member(u, v, ni, nj, bits)
                assert member(W, X) == expect
                assert definitional_member("tensor", (U, V), X) == expect

    def test_associative(self):
        G = GroundSet(2)
        for a, b, c in itertools.product(range(2), repeat=3):
            U, V, W = principal(G, a), principal(G, b), principal(G, c)
            left = tensor(tensor(U, V), W)
            right = tensor(U, tensor(V, W))
            assert left.space.size == right.space.size
            assert left.point == right.point
            assert left.coords == right.coords == (a, b, c)

    def test_projections_of_tensor(self):
        I, J = GroundSet(3), GroundSet(3)
        for u, v in itertools.product(range(3), repeat=2):
            U, V = principal(I, u), principal(J, v)
            W = tensor(U, V)
            assert project(W, 1) == U
            assert project(W, 2) == V
            assert project(W, (1, 2)) == W

    def test_triple_projection(self):
        S = ProductSpace((GroundSet(2), GroundSet(3), GroundSet(4)))
        W = principal(S, (1, 2, 3))
        assert project(W, (1, 3)).coords == (1, 3)

    def test_bad_axes(self):
        W = tensor(principal(GroundSet(2), 0), principal(GroundSet(2), 1))
        for axes in [(0,), (3,), (1, 1), ()]:
            with pytest.raises(ValueError):
                project(W, axes)


class TestPseudoSum:
    def test_example_against_definition(self):
        G = GroundSet(16)
        U, V = principal(G, 2), principal(G, 3)
        W = pseudo_sum(U, V)
        assert W.point == 5
        table = pseudo_sum_table(U.table(), V.table(), 16)
        assert principal_point(table, 16) == 5

    def test_definitional_member_small(self):
        G = GroundSet(6)
        for u, v in itertools.product(range(6), repeat=2):
            if u + v >= 6:
                continue
            U, V = principal(G, u), principal(G, v)
            W = pseudo_sum(U, V)
            for bits in range(1 << 6):
                S = SubsetMask(G, bits)
                A = {t for t in range(6) if (bits >> t) & 1}
                shifted = {m for m in range(6) if v + m in A}
                assert definitional_member("pseudo_sum", (U, V), S) == (u in shifted) == member(W, S)

    def test_zero_is_identity(self):
        G = GroundSet(8)
        for v in range(8):
            assert pseudo_sum(principal(G, 0), principal(G, v)).point == v

    def test_overflow(self):
        G = GroundSet(8)
        with pytest.raises(OverflowBeyondTruncation):
            pseudo_sum(principal(G, 5), principal(G, 3))

    def test_associative_and_image_of_sum(self):
        n = 8
        G = GroundSet(n)
        for a, b, c in itertools.product(range(n), repeat=3):
            if a + b + c >= n:
                continue
            U, V, W = principal(G, a), principal(G, b), principal(G, c)
            assert pseudo_sum(pseudo_sum(U, V), W) == pseudo_sum(U, pseudo_sum(V, W))
            T = tensor(U, V)
            via_image = image(lambda e: sum(T.space.decode(e)) % n, T, G)
            assert via_image == pseudo_sum(U, V)


class TestStar:
    def test_example(self):
        S = ProductSpace((GroundSet(2), GroundSet(2)))
        V, W = principal(S, (1, 0)), principal(S, (0, 1))
        assert star_extension(V, W).coords == (1, 1)

    def test_definition_equals_tensor_of_projections(self):
        S = ProductSpace((GroundSet(2), GroundSet(2)))
        for v, w in itertools.product(range(4), repeat=2):
            V, W = principal(S, v), principal(S, w)
            table = star_table(V.table(), W.table(), 2, 2)
            expect = tensor(project(V, 1), project(W, 2))
            assert np.array_equal(table, expect.table())
            assert star_extension(V, W) == expect

    def test_idempotent(self):
        S = ProductSpace((GroundSet(3), GroundSet(2)))
        for w in range(6):
            W = principal(S, w)
            assert star_extension(W, W) == W


class TestModelCheck:
    @pytest.mark.parametrize("sizes", [(1, 1), (2, 2), (3, 3), (2, 3, 2)])
    def test_passes(self, sizes):
        report = check_model(*sizes)
        assert report.passed, report.to_json()

    def test_counts(self):
        report = check_model(2, 2)
        c = report.clause("tensor_of_projections")
        assert (c.ultrafilters, c.subsets) == (4, 16)
        c = check_model(1, 1).clause("tensor_of_projections")
        assert (c.ultrafilters, c.subsets) == (1, 2)
        c = check_model(3, 3).clause("tensor_of_projections")
        assert (c.ultrafilters, c.subsets) == (9, 512)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            check_model(7, 1)
        with pytest.raises(ValueError):
            check_model(0, 2)

    def test_workers_do_not_change_report(self):
        assert check_model(2, 3, workers=2).to_json() == check_model(2, 3).to_json()
