from fractions import Fraction

import pytest

from backend import linalg
from backend.clifford_core import ONE, ZERO, GaussianRational
from backend.errors import SingularGramError


def test_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert linalg.rank(rows, 3) == 2
    (vector,) = linalg.nullspace(rows, 3)
    for row in rows:
        assert sum((GaussianRational(a) * b for a, b in zip(row, vector)), ZERO) == 0


def test_solve_consistent_and_inconsistent():
    assert linalg.solve([[2, 0], [0, 4]], [1, 1], 2) == [Fraction(1, 2), Fraction(1, 4)]
    assert linalg.solve([[1, 1], [1, 1]], [1, 2], 2) is None


def test_inverse_over_gaussian_rationals():
    i = GaussianRational(0, 1)
    matrix = [[ONE, i], [i, 2]]
    product = linalg.matmul(matrix, linalg.inverse(matrix))
    assert product == [[ONE, ZERO], [ZERO, ONE]]


def test_inverse_of_singular_matrix():
    with pytest.raises(SingularGramError):
        linalg.inverse([[1, 2], [2, 4]])
