#!/usr/bin/env python3
"""
Tests for exact determinants, resultants and the echelon basis
"""
import pytest

from engine.exactnum import get_context
from engine.linalg import EchelonBasis, bareiss_determinant, resultant, sylvester_matrix

Q = get_context(1)
C3 = get_context(3)


def rational_matrix(rows):
    return [[Q.rational(value) for value in row] for row in rows]


def test_bareiss_rational():
    assert bareiss_determinant(rational_matrix([[2, 0, 1], [1, 3, 2], [1, 1, 2]]), Q) == 6
    assert bareiss_determinant(rational_matrix([[2, 0, 1], [1, 3, 2], [1, 1, 1]]), Q) == 0
    assert bareiss_determinant([], Q) == 1


def test_bareiss_swaps_zero_pivot():
    assert bareiss_determinant(rational_matrix([[0, 1], [1, 0]]), Q) == -1
    assert bareiss_determinant(rational_matrix([[0, 2, 1], [3, 0, 0], [0, 0, 4]]), Q) == -24


def test_bareiss_cyclotomic_entries():
    z = C3.zeta(1)
    one = C3.one()
    assert bareiss_determinant([[z, one], [one, z]], C3) == z * z - 1


def test_bareiss_rejects_ragged_matrix():
    with pytest.raises(ValueError):
        bareiss_determinant(rational_matrix([[1, 2], [3]]), Q)


def test_sylvester_shape():
    p = [Q.rational(c) for c in (1, 0, 1)]
    q = [Q.rational(c) for c in (1, 2)]
    matrix = sylvester_matrix(p, q, Q)
    assert len(matrix) == 3
    assert all(len(row) == 3 for row in matrix)


def test_resultant_linear_factors():
    a, b = Q.rational(5), Q.rational(2)
    assert resultant([Q.one(), -a], [Q.one(), -b], Q) == 3


def test_resultant_cyclotomic():
    z = C3.zeta(1)
    # x^2 + 1 evaluated at zeta_3
    assert resultant([C3.one(), C3.zero(), C3.one()], [C3.one(), -z], C3) == -z
    c4 = get_context(4)
    i = c4.zeta(1)
    assert resultant([c4.one(), c4.zero(), c4.one()], [c4.one(), -i], c4) == 0


def test_resultant_constants_and_errors():
    assert resultant([Q.rational(3)], [Q.one(), Q.one(), Q.one()], Q) == 9
    with pytest.raises(ValueError):
        resultant([Q.zero(), Q.one()], [Q.one()], Q)
    with pytest.raises(ValueError):
        resultant([], [Q.one()], Q)


def test_echelon_basis_detects_span():
    basis = EchelonBasis()
    one = C3.one()
    z = C3.zeta(1)
    assert basis.add_vector({(1, 0): one, (0, 1): z})
    assert basis.add_vector({(0, 1): one, (2, 0): one})
    assert not basis.add_vector({(1, 0): one, (0, 1): z + 1, (2, 0): one})
    assert not basis.add_vector({(3, 0): C3.zero()})
    assert len(basis) == 2
    assert basis.add_vector({(2, 0): z})
    assert len(basis) == 3
