from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellpoly import linalg

small_matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(small_matrices)
@settings(max_examples=200)
def test_rank_matches_float_rank(rows):
    assert linalg.rank(rows) == np.linalg.matrix_rank(np.array(rows, dtype=float))


@given(small_matrices)
@settings(max_examples=100)
def test_nullspace_is_annihilated(rows):
    basis = linalg.nullspace(rows, len(rows[0]))
    assert len(basis) == len(rows[0]) - linalg.rank(rows)
    for v in basis:
        assert all(linalg.dot(r, v) == 0 for r in rows)


def test_rank_beyond_machine_words():
    big = 10**30
    assert linalg.rank([[big, big + 1], [big + 1, big + 2]]) == 2
    assert linalg.rank([[big, 2 * big], [3 * big, 6 * big]]) == 1


def test_primitive():
    assert linalg.primitive([Fraction(1, 2), Fraction(-1, 3)]) == (3, -2)
    with pytest.raises(ValueError):
        linalg.primitive([0, 0])


def test_inverse():
    inv = linalg.inverse([[2, 1], [1, 1]])
    assert inv == [[1, -1], [-1, 2]]
    with pytest.raises(ValueError):
        linalg.inverse([[1, 2], [2, 4]])
