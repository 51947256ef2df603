from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regrank.boolfn import Dnf, Subcube, TruthTable, and_fn, constant_fn, or_fn, uc1_witness, xor_fn
from regrank.gadget import (
    Gadget,
    SignMatrix,
    block_of,
    compose,
    constant_gadget,
    discrepancy_bound_holds,
    discrepancy_exact,
    discrepancy_sample,
    gadget_by_name,
    gadget_gl,
    gadget_ip,
    hadamard,
    is_strongly_unbiased,
    lifted_partition,
    lifted_partition_size_bound,
    lindsey_check,
    sign_matrix_of,
)
from regrank.matrix import BoolMatrix, is_regular
from regrank.rank import binary_rank, verify_rectangles


def brute_discrepancy(g: Gadget) -> Fraction:
    """Every rectangle, no pruning."""
    side = g.side
    N = 1 - 2 * g.table.to_numpy()
    best = 0
    for rmask in range(1 << side):
        rows = [i for i in range(side) if rmask >> i & 1]
        sub = N[rows].sum(axis=0) if rows else np.zeros(side, dtype=int)
        for cmask in range(1 << side):
            s = int(sum(sub[j] for j in range(side) if cmask >> j & 1))
            best = max(best, abs(s))
    return Fraction(best, side * side)


class TestTables:
    def test_g1(self):
        assert gadget_gl(1).table.to_lists() == [[0, 1], [1, 0]]

    def test_g2_rows(self):
        assert str(gadget_gl(2).table).split("\n") == ["0011", "0110", "1100", "1001"]

    def test_ip(self):
        assert gadget_ip(1).table.to_lists() == [[0, 0], [0, 1]]
        assert gadget_ip(2)(0b11, 0b11) == 0

    def test_gl_formula_independent_evaluation(self):
        for ell in (1, 2, 3, 4):
            g = gadget_gl(ell)
            for x, y in itertools.product(range(1 << ell), repeat=2):
                xb = [(x >> (ell - 1 - i)) & 1 for i in range(ell)]
                yb = [(y >> (ell - 1 - i)) & 1 for i in range(ell)]
                want = (xb[0] + yb[0] + sum(a * b for a, b in zip(xb[1:], yb[1:]))) % 2
                assert g(x, y) == want

    def test_errors(self):
        with pytest.raises(ValueError):
            gadget_gl(0)
        with pytest.raises(ValueError):
            gadget_ip(0)
        with pytest.raises(ValueError):
            gadget_by_name("and", 2)
        with pytest.raises(ValueError):
            Gadget(2, BoolMatrix.ones(2))


class TestUnbiased:
    @pytest.mark.parametrize("ell", range(1, 9))
    def test_gl(self, ell):
        assert is_strongly_unbiased(gadget_gl(ell))
        assert is_regular(gadget_gl(ell).table) == 2 ** (ell - 1)

    @pytest.mark.parametrize("ell", range(1, 5))
    def test_ip_and_constant_are_not(self, ell):
        assert not is_strongly_unbiased(gadget_ip(ell))
        assert not is_strongly_unbiased(constant_gadget(ell, 0))


class TestCompose:
    def test_xor_g1(self):
        M = compose(xor_fn(2), gadget_gl(1))
        assert M.shape == (4, 4) and is_regular(M) == 2

    def test_constant_one(self):
        for ell in (1, 2):
            assert compose(constant_fn(2, 1), gadget_gl(ell)) == BoolMatrix.ones(1 << (2 * ell))

    def test_and_entry(self):
        assert compose(and_fn(2), gadget_gl(1))[0b00, 0b11] == 1

    def test_entries_match_definition(self):
        f = TruthTable.from_int(3, 0b10110010)
        g = gadget_gl(2)
        M = compose(f, g)
        for x in range(0, 64, 5):
            for y in range(0, 64, 3):
                z = [g(block_of(x, i, 2, 3), block_of(y, i, 2, 3)) for i in (1, 2, 3)]
                assert M[x, y] == f(z)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            compose(and_fn(3), gadget_gl(2), side_cap=32)
        with pytest.raises(ValueError):
            compose(and_fn(3), gadget_gl(1), n=2)

    @given(st.integers(1, 3), st.data())
    @settings(max_examples=40)
    def test_regularity_formula(self, n, data):
        code = data.draw(st.integers(0, (1 << (1 << n)) - 1))
        ell = data.draw(st.integers(1, 2))
        f = TruthTable.from_int(n, code)
        M = compose(f, gadget_gl(ell))
        ones = sum(f.values)
        assert is_regular(M) == 2 ** ((ell - 1) * n) * ones


class TestDiscrepancy:
    def test_g1_exact_equals_bound(self):
        v = discrepancy_exact(gadget_gl(1))
        assert v == Fraction(1, 4)
        assert discrepancy_bound_holds(v, 1)
        assert v * v * 16 == 1

    def test_frozen_values(self):
        # brute-force rectangle enumeration for side <= 4, row-subset enumeration above
        assert discrepancy_exact(gadget_gl(2)) == Fraction(1, 8)
        assert discrepancy_exact(gadget_gl(3)) == Fraction(1, 8)
        assert discrepancy_exact(gadget_gl(4)) == Fraction(5, 64)
        assert discrepancy_exact(gadget_ip(1)) == Fraction(1, 2)

    @pytest.mark.parametrize("g", [gadget_gl(1), gadget_gl(2), gadget_ip(1), gadget_ip(2), constant_gadget(1, 0)])
    def test_matches_brute_force(self, g):
        assert discrepancy_exact(g) == brute_discrepancy(g)

    def test_bound(self):
        for ell in (1, 2, 3, 4):
            assert discrepancy_bound_holds(discrepancy_exact(gadget_gl(ell)), ell)
        assert not discrepancy_bound_holds(Fraction(1, 2), 1)

    def test_constant(self):
        assert discrepancy_exact(constant_gadget(1, 0)) == 1
        assert discrepancy_sample(constant_gadget(2, 1), 10) == 1

    def test_side_limit(self):
        with pytest.raises(ValueError):
            discrepancy_exact(gadget_gl(5))

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_sample_is_lower_bound(self, ell):
        g = gadget_gl(ell)
        assert discrepancy_sample(g, 500, seed=ell) <= discrepancy_exact(g)

    def test_sample_deterministic(self):
        g = gadget_gl(3)
        assert discrepancy_sample(g, 300, seed=4) == discrepancy_sample(g, 300, seed=4)
        with pytest.raises(ValueError):
            discrepancy_sample(g, 0)


class TestHadamard:
    def test_small(self):
        assert hadamard(0).entries == ((1,),)
        assert hadamard(1).entries == ((1, 1), (1, -1))
        assert hadamard(2).entries[3] == (1, -1, -1, 1)

    @pytest.mark.parametrize("ell", range(0, 5))
    def test_lindsey(self, ell):
        H = hadamard(ell)
        assert H.is_hadamard
        assert lindsey_check(H)

    def test_full_sum_h2(self):
        assert abs(hadamard(2).to_numpy().sum()) == 4

    def test_sign_matrix_of_gl_is_not_hadamard(self):
        # flipping x_1 negates the whole row
        for ell in (1, 2, 3):
            N = sign_matrix_of(gadget_gl(ell))
            assert not N.is_hadamard
            half = 1 << (ell - 1)
            assert N.entries[0] == tuple(-e for e in N.entries[half])

    def test_non_hadamard_rejected(self):
        with pytest.raises(ValueError):
            lindsey_check(SignMatrix(2, ((1, 1), (1, 1))))
        with pytest.raises(ValueError):
            SignMatrix(2, ((1, 0), (1, 1)))


class TestLift:
    def test_and2_g1(self):
        phi = Dnf((Subcube({1: 1, 2: 1}),), True)
        P = lifted_partition(phi, gadget_gl(1), 2)
        assert len(P) == 4
        assert verify_rectangles(compose(and_fn(2), gadget_gl(1)), P)

    def test_constant_one(self):
        P = lifted_partition(Dnf((Subcube(),), True), gadget_gl(1), 2)
        assert len(P) == 1 and P.rects[0].area == 16

    def test_xor2_bound(self):
        phi = Dnf((Subcube({1: 1, 2: 0}), Subcube({1: 0, 2: 1})), True)
        P = lifted_partition(phi, gadget_gl(1), 2)
        assert len(P) <= lifted_partition_size_bound(phi, 1) == 32
        assert verify_rectangles(compose(xor_fn(2), gadget_gl(1)), P)

    def test_rejects_ambiguous(self):
        with pytest.raises(ValueError):
            lifted_partition(Dnf((Subcube({1: 1}), Subcube({2: 1})), True), gadget_gl(1), 2)
        with pytest.raises(ValueError):
            lifted_partition(Dnf((Subcube({1: 1}), Subcube({2: 1})), False), gadget_gl(1), 2)

    @pytest.mark.parametrize("ell", [1, 2])
    @pytest.mark.parametrize("f", [and_fn(2), xor_fn(2), or_fn(2)])
    def test_upper_bounds_exact_rank(self, f, ell):
        _, phi = uc1_witness(f)
        g = gadget_gl(ell)
        M = compose(f, g)
        P = lifted_partition(phi, g, 2)
        assert verify_rectangles(M, P)
        assert len(P) <= lifted_partition_size_bound(phi, ell)
        res = binary_rank(M, node_budget=20_000)
        # budgeted values are upper bounds on R_bin, so only optimal ones compare
        if res.optimal:
            assert len(P) >= res.value
