from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memline.tridiag import SolverError, TridiagonalSystem, solve_tridiagonal

from oracles import dense_gauss, random_dominant, rel_err


def test_single_equation():
    x = solve_tridiagonal(TridiagonalSystem([0.0], [4.0], [0.0], [2.0]))
    assert x.tolist() == [0.5]


def test_small_example():
    # 2x - y = 1, -x + 2y - z = 0, -y + 2z = 1 (diag bumped for dominance)
    s = TridiagonalSystem([0, -1, -1], [3, 3, 3], [-1, -1, 0], [2, 1, 2])
    x = solve_tridiagonal(s)
    np.testing.assert_allclose(x, [1.0, 1.0, 1.0], rtol=1e-15)
    assert np.max(np.abs(s.residual(x))) < 1e-15


def test_ignored_corners():
    a = TridiagonalSystem([0, -1], [3, 3], [-1, 0], [1, 1])
    b = TridiagonalSystem([99, -1], [3, 3], [-1, 99], [1, 1])
    np.testing.assert_array_equal(solve_tridiagonal(a), solve_tridiagonal(b))


def test_rejects_weak_diagonal():
    s = TridiagonalSystem([0, -1, -1], [2, 2, 2], [-1, -1, 0], [1, 1, 1])
    with pytest.raises(SolverError, match=r"rows \[1\]"):
        solve_tridiagonal(s)


def test_rejects_empty_and_bad_shapes():
    with pytest.raises(SolverError):
        solve_tridiagonal(TridiagonalSystem([], [], [], []))
    with pytest.raises(ValueError):
        TridiagonalSystem([0, 0], [1, 1, 1], [0, 0, 0], [1, 1, 1])


def test_dense_matches_layout():
    s = TridiagonalSystem([0, 2, 3], [5, 6, 7], [8, 9, 0], [0, 0, 0])
    np.testing.assert_array_equal(s.dense(), [[5, 8, 0], [2, 6, 9], [0, 3, 7]])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_matches_dense_oracle(n, seed):
    s = random_dominant(np.random.default_rng(seed), n)
    assert rel_err(solve_tridiagonal(s), dense_gauss(s.dense(), s.rhs)) <= 1e-10


def test_diagonal_only():
    s = TridiagonalSystem([0, 0, 0], [2, 4, 8], [0, 0, 0], [1, 1, 1])
    np.testing.assert_array_equal(solve_tridiagonal(s), [0.5, 0.25, 0.125])


def test_two_by_two_symmetric():
    s = TridiagonalSystem([0, -1], [2, 2], [-1, 0], [1, 1])
    assert s.is_dominant()
    np.testing.assert_allclose(solve_tridiagonal(s), [1.0, 1.0], rtol=1e-15)
