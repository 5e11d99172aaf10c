import itertools
from math import factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultracomb.errors import CapExceeded, SearchBudgetExceeded, ShapeMismatch
from ultracomb.intset import IntSet
from ultracomb.patterns import Witness, verify_witness
from ultracomb.sumsets import (
    SumsetCertificate,
    SumsetSpec,
    compile_spec,
    difference_mask,
    find_full_sumset,
    find_general,
    find_ksum_distinct,
    find_ksum_same,
    plant_instance,
    product_preimage,
    sum_preimage,
    sumset_mask,
    verify_certificate,
)


def multiples(step, bound, offset=0):
    return IntSet.from_elements(bound, range(offset, bound, step))


def brute_combos_ok(A, spec, sets):
    """Every required combination, written out with explicit index loops."""
    if spec.staggered:
        L = len(sets[0])
        for js in itertools.combinations(range(L), spec.k):
            vals = [sets[s][j] for s, j in enumerate(js)]
            total = sum(vals) if spec.mode == "additive" else int(np.prod(vals))
            if total >= A.bound or total not in A:
                return False
        return True
    choices = [list(itertools.combinations(seq, c)) for seq, c in zip(sets, spec.multiplicities)]
    for combo in itertools.product(*choices):
        vals = [x for part in combo for x in part]
        total = sum(vals) if spec.mode == "additive" else int(np.prod(vals))
        if total >= A.bound or total not in A:
            return False
    return True


class TestPreimage:
    def test_singleton_zero(self):
        X = sum_preimage(IntSet.from_elements(8, [0]), 2)
        assert X.tuples() == [(0, 0)]

    def test_evens(self):
        X = sum_preimage(multiples(2, 16), 2)
        want = [(x, y) for x in range(16) for y in range(16) if (x + y) % 2 == 0 and x + y < 16]
        assert X.tuples() == want

    def test_empty(self):
        assert sum_preimage(IntSet.empty(16), 2).tuples() == []

    def test_product_preimage(self):
        X = product_preimage(multiples(4, 16), 2)
        want = [(x, y) for x in range(16) for y in range(16) if x * y % 4 == 0 and x * y < 16]
        assert X.tuples() == want

    @given(st.integers(1, 200), st.integers(1, 200), st.integers(1, 400), st.integers(0, 2**32))
    def test_sumset_and_difference_masks(self, na, nb, n, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.random(na) < 0.3, rng.random(nb) < 0.3
        got = sumset_mask(a, b, n)
        want = np.zeros(n, dtype=bool)
        for x in np.flatnonzero(a):
            for y in np.flatnonzero(b):
                if x + y < n:
                    want[x + y] = True
        assert np.array_equal(got, want)
        r = rng.random(n) < 0.3
        diff = difference_mask(r, b, na)
        want = np.array([any(y + z < n and r[y + z] for z in np.flatnonzero(b)) for y in range(na)], dtype=bool)
        assert np.array_equal(diff, want)


class TestCompile:
    def test_two_bijections(self):
        phis = compile_spec(SumsetSpec((1, 1))).phis
        assert sorted(p.values for p in phis) == [(1, 2), (2, 1)]

    def test_bbc(self):
        assert len(compile_spec(SumsetSpec((2, 1))).phis) == 3

    def test_single_multiplicity(self):
        for k in (1, 2, 3, 4):
            (phi,) = compile_spec(SumsetSpec((k,))).phis
            assert phi.values == (1,) * k

    @pytest.mark.parametrize("mult", [(1,), (2, 2), (1, 2, 2), (3, 1), (1, 1, 1), (2, 1, 1, 1)])
    def test_multinomial(self, mult):
        phis = compile_spec(SumsetSpec(mult)).phis
        want = factorial(sum(mult))
        for c in mult:
            want //= factorial(c)
        assert len(phis) == len(set(phis)) == want
        for phi in phis:
            assert [phi.values.count(s + 1) for s in range(len(mult))] == list(mult)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            compile_spec(SumsetSpec((4, 3)))

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            SumsetSpec((0, 1))
        with pytest.raises(ValueError):
            SumsetSpec((2, 1), staggered=True)
        with pytest.raises(ValueError):
            SumsetSpec((1,), mode="xor")

    @given(st.data())
    def test_compilation_equivalence(self, data):
        mult = tuple(data.draw(st.lists(st.integers(1, 2), min_size=1, max_size=3)))
        mode = data.draw(st.sampled_from(["additive", "multiplicative"]))
        staggered = set(mult) == {1} and data.draw(st.booleans())
        spec = SumsetSpec(mult, mode, staggered=staggered, allow_zero=True)
        bound = 48
        A = IntSet(bound, np.random.default_rng(data.draw(st.integers(0, 2**32))).random(bound) < 0.6)
        L = data.draw(st.integers(1, 3))
        pool = data.draw(st.permutations(range(1 if mode == "multiplicative" else 0, 12)))
        sets = [sorted(pool[s * L : (s + 1) * L]) for s in range(spec.k)]
        pattern = compile_spec(spec).pattern(A)
        via_pattern = verify_witness(pattern, Witness(sets)).passed
        via_cert = verify_certificate(A, SumsetCertificate(sets, spec)).passed
        assert via_pattern == via_cert == brute_combos_ok(A, spec, sets)


class TestDetectors:
    def test_ksum_evens(self):
        A = multiples(2, 128)
        B = find_ksum_same(A, 2, 5)
        assert len(B) == 5 and len({b % 2 for b in B}) == 1
        cert = find_general(A, SumsetSpec((2,)), 5)
        assert cert.verified_count == 10

    def test_ksum_full(self):
        for k in (2, 3):
            assert find_ksum_same(IntSet.full(64), k, 5) == [0, 1, 2, 3, 4]

    def test_ksum_singleton_one(self):
        assert find_ksum_same(IntSet.from_elements(16, [1]), 2, 2) == [0, 1]

    def test_ksum_length_guard(self):
        with pytest.raises(ValueError):
            find_ksum_same(IntSet.full(8), 3, 2)

    def test_distinct_multiples_of_three(self):
        A = multiples(3, 256)
        B1, B2 = find_ksum_distinct(A, 2, 4)
        assert brute_combos_ok(A, SumsetSpec((1, 1), staggered=True), [B1, B2])
        assert all((B1[i] + B2[j]) % 3 == 0 for i in range(4) for j in range(i + 1, 4))

    def test_distinct_full(self):
        assert find_ksum_distinct(IntSet.full(32), 2, 3) is not None

    def test_distinct_odds(self):
        B1, B2 = find_ksum_distinct(multiples(2, 256, 1), 2, 3)
        assert {b % 2 for b in B1} != {b % 2 for b in B2}
        assert len({b % 2 for b in B1}) == len({b % 2 for b in B2}) == 1

    def test_full_sumset_evens(self):
        A = multiples(2, 256)
        B, C = find_full_sumset(A, 4)
        assert all((b + c) in A for b in B for c in C)
        assert not set(B) & set(C)

    def test_full_sumset_odds(self):
        B, C = find_full_sumset(multiples(2, 256, 1), 4)
        assert {b % 2 for b in B} | {c % 2 for c in C} == {0, 1}
        assert len({b % 2 for b in B}) == 1 and len({c % 2 for c in C}) == 1

    def test_full_sumset_two_order_union(self):
        A = multiples(3, 300)
        B, C = find_full_sumset(A, 4)
        first = {B[i] + C[j] for i in range(4) for j in range(4) if i <= j}
        second = {C[j] + B[i] for i in range(4) for j in range(4) if j < i}
        assert first | second == {b + c for b in B for c in C}
        assert all(x in A for x in first | second)

    def test_full_sumset_whole_segment(self):
        B, C = find_full_sumset(IntSet.full(32), 2)
        assert not set(B) & set(C)

    def test_general_bbc(self):
        A = multiples(4, 512)
        spec = SumsetSpec((2, 1))
        cert = find_general(A, spec, 3)
        assert verify_certificate(A, cert).passed
        assert brute_combos_ok(A, spec, cert.sets)
        assert cert.verified_count == 3 * 3

    def test_general_planted_bccdd(self):
        spec = SumsetSpec((1, 2, 2))
        A, planted = plant_instance(spec, 512, 2, np.random.default_rng(0))
        assert brute_combos_ok(A, spec, planted)
        cert = find_general(A, spec, 2, max_nodes=100_000)
        assert cert is not None and verify_certificate(A, cert).passed

    def test_multiplicative_staggered(self):
        A = multiples(4, 1024)
        B1, B2 = find_ksum_distinct(A, 2, 3, mode="multiplicative")
        assert 0 not in B1 + B2
        assert brute_combos_ok(A, SumsetSpec((1, 1), "multiplicative", staggered=True), [B1, B2])

    def test_multiplicative_full(self):
        assert find_ksum_distinct(IntSet.full(64), 2, 3, mode="multiplicative") is not None

    def test_multiplicative_singleton_one(self):
        assert find_ksum_same(IntSet.from_elements(64, [1]), 2, 2, mode="multiplicative") is None

    def test_budget(self):
        spec = SumsetSpec((1, 2, 2))
        A, _ = plant_instance(spec, 256, 3, np.random.default_rng(3))
        with pytest.raises(SearchBudgetExceeded):
            find_general(A, spec, 3, max_nodes=50)


class TestVerifyCertificate:
    def test_mutation(self):
        A = multiples(2, 256)
        spec = SumsetSpec((1, 1))
        cert = find_general(A, spec, 4)
        assert verify_certificate(A, cert).passed
        sets = [list(s) for s in cert.sets]
        sets[1][0] += 1
        sets[1].sort()
        v = verify_certificate(A, SumsetCertificate(sets, spec))
        assert not v.passed
        b, c = v.violation["parts"]
        assert v.violation["value"] == b[0] + c[0] and v.violation["value"] not in A

    def test_empty_sequences(self):
        spec = SumsetSpec((1, 2))
        v = verify_certificate(IntSet.empty(16), SumsetCertificate([[], []], spec))
        assert v.passed and v.counts["verified"] == 0
        assert find_general(IntSet.empty(16), spec, 0).verified_count == 0

    def test_structural_failures(self):
        A = IntSet.full(32)
        spec = SumsetSpec((1, 1))
        assert not verify_certificate(A, SumsetCertificate([[1, 2], [2, 3]], spec)).passed
        assert not verify_certificate(A, SumsetCertificate([[2, 1], [4, 5]], spec)).passed
        assert not verify_certificate(A, SumsetCertificate([[1, 40], [4, 5]], spec)).passed
        with pytest.raises(ShapeMismatch):
            verify_certificate(A, SumsetCertificate([[1]], spec))

    @given(st.data())
    def test_monotone_in_A(self, data):
        seed = data.draw(st.integers(0, 2**32))
        rng = np.random.default_rng(seed)
        mult = tuple(data.draw(st.lists(st.integers(1, 2), min_size=1, max_size=2)))
        spec = SumsetSpec(mult)
        A, planted = plant_instance(spec, 128, 2, rng)
        bigger = A | IntSet(128, rng.random(128) < 0.3)
        assert verify_certificate(bigger, SumsetCertificate(planted, spec)).passed
        cert = find_general(A, spec, 2)
        assert verify_certificate(bigger, cert).passed


class TestPlantAndRecover:
    @given(st.data())
    def test_small_shapes(self, data):
        mult = tuple(data.draw(st.lists(st.integers(1, 2), min_size=1, max_size=3).filter(lambda m: sum(m) <= 5)))
        mode = data.draw(st.sampled_from(["additive", "multiplicative"]))
        staggered = set(mult) == {1} and len(mult) > 1 and data.draw(st.booleans())
        spec = SumsetSpec(mult, mode, staggered=staggered)
        L = data.draw(st.integers(1, 2))
        bound = 512
        try:
            A, planted = plant_instance(spec, bound, L, np.random.default_rng(data.draw(st.integers(0, 2**32))))
        except ValueError:
            return  # multiplicative combinations can escape a small bound
        assert brute_combos_ok(A, spec, planted)
        cert = find_general(A, spec, L, max_nodes=200_000)
        assert cert is not None
        assert verify_certificate(A, cert).passed
