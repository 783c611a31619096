from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mbqcorder import gf2
from mbqcorder.exceptions import Infeasible, Singular
from mbqcorder.gf2 import BitMatrix


@st.composite
def matrices(draw, max_dim=7):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r))
    return BitMatrix.from_ints(rows, c)


def test_construction_and_access():
    m = BitMatrix([[1, 0, 1], [0, 1, 1]])
    assert m.shape == (2, 3)
    assert m[0, 2] == 1 and m[1, 0] == 0
    assert m.T.to_lists() == [[1, 0], [0, 1], [1, 1]]
    assert BitMatrix.from_array(np.array([[1, 0, 1], [0, 1, 1]])) == m
    assert m.row_strings() == ["101", "011"]
    with pytest.raises(IndexError):
        m[2, 0]
    with pytest.raises(ValueError):
        BitMatrix([[1, 0], [1]])


def test_arithmetic():
    a = BitMatrix([[1, 1], [0, 1]])
    assert a @ a == BitMatrix.identity(2)
    assert (a + a).is_zero()
    assert a.apply(0b01) == 0b01 and a.apply(0b10) == 0b11


def test_rank_examples():
    assert gf2.rank(BitMatrix.identity(4)) == 4
    assert gf2.rank(BitMatrix([[1, 1], [1, 1]])) == 1
    assert gf2.rank(BitMatrix.zeros(3, 3)) == 0


def test_invert_singular():
    with pytest.raises(Singular):
        gf2.invert(BitMatrix([[1, 1], [1, 1]]))
    with pytest.raises(ValueError):
        gf2.invert(BitMatrix.zeros(2, 3))


def test_solve_infeasible():
    a = BitMatrix([[1, 0], [1, 0]])
    with pytest.raises(Infeasible):
        gf2.solve(a, BitMatrix.column([0, 1]))
    x = gf2.solve(a, BitMatrix.column([1, 1]))
    assert a @ x == BitMatrix.column([1, 1])


def test_leftmost_pivots():
    m = BitMatrix([[0, 1, 1, 0], [0, 1, 0, 1]])
    assert gf2.rref(m)[2] == [1, 2]
    assert gf2.independent_columns(m, [3, 2, 1]) == [3, 2]


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rref_properties(m):
    r, ops, piv = gf2.rref(m)
    assert ops @ m == r
    assert gf2.rank(ops) == m.nrows
    assert piv == sorted(piv)
    for k, c in enumerate(piv):
        assert r.col_bits(c) == tuple(int(i == k) for i in range(m.nrows))
    assert len(piv) == oracles.rank(m.rows)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_invert_random(n, seed):
    m = gf2.random_invertible(n, np.random.default_rng(seed))
    inv = gf2.invert(m)
    assert inv @ m == BitMatrix.identity(n) == m @ inv


@settings(max_examples=100, deadline=None)
@given(matrices(), st.integers(0, 2**32 - 1))
def test_solve_consistent_rhs(a, seed):
    rng = np.random.default_rng(seed)
    x0 = gf2.random_matrix(a.ncols, 2, rng)
    b = a @ x0
    assert a @ gf2.solve(a, b) == b
