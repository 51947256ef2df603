from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from regrank.matrix import (
    BoolMatrix,
    MatrixFormatError,
    Rectangle,
    all_regular,
    complement,
    is_regular,
    parse_matrix,
    random_regular,
    real_rank,
    serialize_matrix,
)
from regrank.gadget import gadget_gl

from oracles import brute_real_rank


@st.composite
def matrices(draw, max_side=5):
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    grid = draw(st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return BoolMatrix.from_rows(grid)


class TestParse:
    def test_simple(self):
        M = parse_matrix("2 2\n01\n10\n")
        assert M.one_entries() == [(0, 1), (1, 0)]

    def test_one_by_one(self):
        assert parse_matrix("1 1\n1\n") == BoolMatrix.ones(1)

    def test_bytes_and_missing_final_newline(self):
        assert parse_matrix(b"2 3\n010\n111") == BoolMatrix.from_rows([[0, 1, 0], [1, 1, 1]])

    def test_trailing_blank_line_tolerated(self):
        assert parse_matrix("1 2\n10\n\n") == BoolMatrix.from_rows([[1, 0]])

    def test_comment_lines_skipped(self):
        assert parse_matrix("# ell=1\n2 2\n01\n10\n") == BoolMatrix.from_rows([[0, 1], [1, 0]])

    @pytest.mark.parametrize(
        "text, line",
        [
            ("2 2\n012\n10\n", 2),
            ("2 2\n0a\n10\n", 2),
            ("2 2\n01\n1\n", 3),
            ("2x2\n01\n10\n", 1),
            ("2 2\n01\n", None),
            ("0 2\n", 1),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(MatrixFormatError) as info:
            parse_matrix(text)
        if line is not None:
            assert f"line {line}" in str(info.value)

    @given(matrices())
    def test_round_trip(self, M):
        text = serialize_matrix(M)
        assert parse_matrix(text) == M
        assert serialize_matrix(parse_matrix(text)) == text


class TestBasics:
    def test_complement_examples(self):
        assert complement(BoolMatrix.identity(2)).to_lists() == [[0, 1], [1, 0]]
        assert complement(BoolMatrix.ones(3)) == BoolMatrix.zeros(3)

    def test_complement_of_g2_is_2_regular(self):
        assert is_regular(complement(gadget_gl(2).table)) == 2

    @given(matrices())
    def test_complement_involution(self, M):
        assert complement(complement(M)) == M

    def test_is_regular_examples(self):
        for n in range(1, 6):
            assert is_regular(BoolMatrix.identity(n)) == 1
        for ell in (1, 2, 3):
            assert is_regular(gadget_gl(ell).table) == 2 ** (ell - 1)
        assert is_regular(BoolMatrix.from_rows([[1, 1], [0, 1]])) is None

    def test_is_regular_needs_square(self):
        with pytest.raises(ValueError):
            is_regular(BoolMatrix.ones(2, 3))

    @given(matrices())
    def test_regularity_transpose_invariant(self, M):
        if M.rows == M.cols:
            assert is_regular(M) == is_regular(M.transpose())

    def test_rectangle_validation(self):
        with pytest.raises(ValueError):
            Rectangle((), (0,))
        r = Rectangle((2, 0), (1,))
        assert r.row_set == (0, 2) and r.area == 2
        assert not r.in_bounds(BoolMatrix.ones(2))


class TestRealRank:
    def test_examples(self):
        for n in range(1, 6):
            assert real_rank(BoolMatrix.identity(n)) == n
            assert real_rank(BoolMatrix.ones(n)) == 1
        C = BoolMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert real_rank(C) == 3
        assert real_rank(complement(C)) == 3
        assert real_rank(BoolMatrix.zeros(3)) == 0

    @given(matrices(6))
    @settings(max_examples=150)
    def test_matches_sympy(self, M):
        assert real_rank(M) == brute_real_rank(M.to_lists())

    @given(matrices())
    def test_transpose_invariant(self, M):
        assert real_rank(M) == real_rank(M.transpose())


class TestRandomRegular:
    def test_permutation(self):
        for seed in range(5):
            M = random_regular(3, 1, seed)
            assert is_regular(M) == 1

    def test_n5_d2_seed7(self):
        assert is_regular(random_regular(5, 2, 7)) == 2

    @pytest.mark.parametrize("n,d", [(2, 2), (3, 0), (3, 4)])
    def test_infeasible(self, n, d):
        with pytest.raises(ValueError):
            random_regular(n, d, 0)

    def test_deterministic(self):
        assert random_regular(9, 4, 123) == random_regular(9, 4, 123)

    def test_dense_cases_fall_back_cleanly(self):
        # near-complete degrees force the matching fallback
        for seed in range(3):
            assert is_regular(random_regular(12, 11, seed)) == 11
            assert is_regular(random_regular(30, 25, seed)) == 25

    def test_brualdi_manber_ross(self):
        rng = random.Random(5)
        for _ in range(40):
            n = rng.randint(2, 9)
            d = rng.randint(1, n - 1)
            M = random_regular(n, d, rng.getrandbits(64))
            assert real_rank(M) == real_rank(complement(M))


def test_all_regular_counts():
    # number of d-regular n x n 0,1 matrices: 3x3 -> 6, 6; 4x4 -> 24, 90, 24
    assert [sum(1 for _ in all_regular(3, d)) for d in (1, 2)] == [6, 6]
    assert [sum(1 for _ in all_regular(4, d)) for d in (1, 2, 3)] == [24, 90, 24]
