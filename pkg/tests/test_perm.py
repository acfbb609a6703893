import doctest
import itertools

import pytest
from hypothesis import given, strategies as st

import tracefluct.perm
from tracefluct.exact import Scalar, as_scalar
from tracefluct.perm import (
    AnnulusProfile,
    Permutation,
    SetPartition,
    all_permutations,
    bell_number,
    classical_cumulant,
    compose,
    enumerate_partitions,
    induced_on_cycles,
    join_with,
    kernel,
    mobius_to_top,
)


def test_module_doctests():
    failures, _ = doctest.testmod(tracefluct.perm)
    assert failures == 0


perms = st.integers(min_value=1, max_value=7).flatmap(
    lambda n: st.permutations(list(range(1, n + 1)))
).map(lambda images: Permutation(tuple(images)))


class TestPermutation:
    def test_identity_compose(self):
        q = Permutation.from_cycle_string(4, "(1,3,2)")
        assert compose(Permutation.identity(4), q) == q
        assert compose(q, Permutation.identity(4)) == q

    def test_inverse_pair(self):
        p = Permutation.from_cycle_string(3, "(1,2,3)")
        q = Permutation.from_cycle_string(3, "(1,3,2)")
        assert compose(p, q).is_identity()

    def test_fixed_convention_example(self):
        # p = (1,3,2) applied after q = (1,2)(3) is (1)(2,3), with 2 cycles
        p = Permutation.from_cycle_string(3, "(1,3,2)")
        q = Permutation.from_cycle_string(3, "(1,2)(3)")
        r = compose(p, q)
        assert r.cycle_string() == "(1)(2,3)"
        assert r.cycle_count() == 2

    def test_cycle_counts(self):
        assert Permutation.identity(4).cycle_count() == 4
        assert Permutation.from_cycle_string(4, "(1,2,3,4)").cycle_count() == 1
        assert Permutation.from_cycle_string(3, "(1,2)").cycle_count() == 2

    def test_bad_images_rejected(self):
        with pytest.raises(ValueError):
            Permutation((1, 1, 3))
        with pytest.raises(ValueError):
            Permutation.from_cycles(3, [(1, 4)])

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            compose(Permutation.identity(3), Permutation.identity(4))

    @given(perms)
    def test_inverse_properties(self, p):
        assert compose(p, p.inverse()).is_identity()
        assert p.cycle_count() == p.inverse().cycle_count()

    @given(perms)
    def test_cycle_string_roundtrip(self, p):
        assert Permutation.from_cycle_string(p.size, p.cycle_string()) == p


class TestGamma:
    def test_examples(self):
        assert AnnulusProfile((2, 1)).gamma().cycle_string() == "(1,2)(3)"
        assert AnnulusProfile((3,)).gamma().cycle_string() == "(1,2,3)"
        assert AnnulusProfile((2, 2)).gamma().cycle_string() == "(1,2)(3,4)"

    def test_circle_lookup(self):
        prof = AnnulusProfile((2, 3, 1))
        assert [prof.circle_of(x) for x in range(1, 7)] == [0, 0, 1, 1, 1, 2]
        assert prof.points_of(1) == (3, 4, 5)

    def test_bad_profile(self):
        with pytest.raises(ValueError):
            AnnulusProfile((2, 0))


class TestSetPartition:
    def test_kernel_examples(self):
        assert kernel((5, 5, 5)).blocks == ((1, 2, 3),)
        assert kernel((1, 2, 1)).blocks == ((1, 3), (2,))
        assert kernel((7, 3, 3, 7)).blocks == ((1, 4), (2, 3))

    def test_enumerate_bell_counts(self):
        for n in range(1, 8):
            parts = enumerate_partitions(n)
            assert len(parts) == bell_number(n)
            assert len(set(parts)) == len(parts)

    def test_guard(self):
        with pytest.raises(ValueError):
            enumerate_partitions(13)
        with pytest.raises(ValueError):
            enumerate_partitions(0)

    def test_mobius(self):
        assert mobius_to_top(SetPartition.one_block(4)) == 1
        assert mobius_to_top(SetPartition.from_blocks(3, [(1, 2), (3,)])) == -1
        assert mobius_to_top(SetPartition.singletons(3)) == 2

    def test_mobius_sum_identity(self):
        # sum over B with A <= B <= 1 of mu(B, 1) is the indicator of A == 1
        for r in range(1, 7):
            for a in enumerate_partitions(r):
                total = sum(mobius_to_top(b) for b in enumerate_partitions(r) if a.refines(b))
                assert total == (1 if a.block_count == 1 else 0), (r, a)

    def test_join_examples(self):
        gamma = Permutation.from_cycle_string(4, "(1,2)(3,4)")
        assert join_with(Permutation.identity(4), gamma).blocks == ((1, 2), (3, 4))
        sigma = Permutation.from_cycle_string(4, "(1,3)")
        assert join_with(sigma, gamma).blocks == ((1, 2, 3, 4),)
        assert join_with(gamma, gamma).blocks == ((1, 2), (3, 4))

    def test_induced_on_cycles(self):
        gamma = AnnulusProfile((2, 2, 2)).gamma()
        sigma = Permutation.from_cycle_string(6, "(1,3)")
        joined = join_with(sigma, gamma)
        assert induced_on_cycles(joined, gamma).blocks == ((1, 2), (3,))


class TestClassicalCumulant:
    def test_first_two_orders(self):
        moments = {("a",): as_scalar(3), ("a", "a"): as_scalar(11)}
        oracle = lambda args: moments[args]
        assert classical_cumulant(oracle, ["a"]) == 3
        assert classical_cumulant(oracle, ["a", "a"]) == 11 - 9

    def test_constant_has_no_higher_cumulants(self):
        oracle = lambda args: as_scalar(1)
        for r in range(2, 6):
            assert classical_cumulant(oracle, ["c"] * r).is_zero()

    def test_multilinear_and_unit_slot(self):
        # moments of independent fair coin (0/1): E prod over any multiset
        def oracle(args):
            # x is Bernoulli(1/2): E[x^k] = 1/2; constant slot "1" contributes 1
            return as_scalar(1) if all(a == "1" for a in args) else Scalar("1/2")

        # vanishing with a unit slot, r >= 2
        assert classical_cumulant(oracle, ["x", "1"]).is_zero()
        assert classical_cumulant(oracle, ["x", "x", "1"]).is_zero()

    def test_third_cumulant_of_bernoulli(self):
        # k3 of Bernoulli(p) is p(1-p)(1-2p); with p = 1/2 it vanishes
        oracle = lambda args: Scalar("1/2")
        assert classical_cumulant(oracle, ["x", "x", "x"]).is_zero()
        # and with p = 1/3: k3 = (1/3)(2/3)(1/3) = 2/27
        oracle3 = lambda args: Scalar("1/3")
        assert classical_cumulant(oracle3, ["x", "x", "x"]) == Scalar("2/27")
