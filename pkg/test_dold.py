#!/usr/bin/env python3
"""
Tests for Dold indices, orbit counts and admissible period sets
"""
import os
import random
from fractions import Fraction

import pytest

from engine.classify import (
    LinearSpec,
    builtin_example,
    positive_witness,
    random_resonant_perturbation,
    witness_germ,
)
from engine.dold import (
    admissible_periods,
    dold_index,
    dold_report,
    eigenvalue_orders,
    index_consistency,
    orbit_count,
    prime_subsets,
)
from engine.errors import DivisibilityError, IndexConsistencyError, NonIsolatedFixedPointError
from engine.exactnum import get_context
from engine.jet import GermMap, Matrix2, conjugate
from engine.multiplicity import FixedPointIndexer, MultiplicityResult

PROPERTY_CASES = int(os.getenv("PROPERTY_CASES", "4"))

Q = get_context(1)


class ScriptedIndexer(FixedPointIndexer):
    """Indexer answering from a fixed table of mu values"""

    def __init__(self, germ: GermMap, values: dict):
        super().__init__(germ)
        self.values = values

    def index(self, m: int) -> MultiplicityResult:
        return MultiplicityResult(order=self.values[m], method="scripted")


def test_prime_subsets_examples():
    assert prime_subsets(12) == [(12, 1), (6, -1), (4, -1), (2, 1)]
    assert prime_subsets(1) == [(1, 1)]
    assert prime_subsets(7) == [(7, 1), (1, -1)]
    terms = prime_subsets(30)
    assert len(terms) == 8
    assert sum(sign for _, sign in terms) == 0


def test_prime_subsets_rejects_non_positive():
    with pytest.raises(ValueError):
        prime_subsets(0)


def test_admissible_periods_diagonal():
    c6 = get_context(6)
    assert list(admissible_periods(Matrix2.diagonal(c6.zeta(3), c6.zeta(2)))) == [1, 2, 3, 6]

    assert list(admissible_periods(Matrix2.diagonal(Q.rational(2), Q.rational(3)))) == [1]

    c12 = get_context(12)
    assert list(admissible_periods(Matrix2.diagonal(c12.zeta(3), c12.zeta(2)))) == [1, 4, 6, 12]


def test_eigenvalue_orders_outside_the_field():
    rotation = Matrix2(*(Q.rational(v) for v in (0, -1, 1, 0)))
    assert eigenvalue_orders(rotation) == (4, 4)
    assert list(admissible_periods(rotation)) == [1, 4]


def test_eigenvalue_orders_of_jordan_block():
    c3 = get_context(3)
    jordan = Matrix2(c3.zeta(1), c3.zero(), c3.one(), c3.zeta(1))
    assert eigenvalue_orders(jordan) == (3, 3)


def test_example_e2_table():
    f = builtin_example("e2", k=2)
    report = dold_report(f, 6)
    assert [row.period for row in report.rows] == [1, 2, 3, 6]
    assert [row.mu for row in report.rows] == [1, 5, 7, 17]
    assert [row.dold for row in report.rows] == [1, 4, 6, 6]
    assert [row.orbits for row in report.rows] == [1, 2, 2, 1]
    assert report.admissible_periods == [1, 2, 3, 6]
    assert report.consistent
    assert report.orbit_count == 1


def test_example_e2_with_k_three():
    f = builtin_example("e2", k=3)
    indexer = FixedPointIndexer(f, period=6)
    assert indexer.index(2).order == 7
    assert indexer.index(3).order == 10
    assert indexer.index(6).order == 22
    assert orbit_count(f, 2, indexer) == 3
    assert orbit_count(f, 3, indexer) == 3
    assert orbit_count(f, 6, indexer) == 1


def test_c8_has_a_single_hidden_orbit():
    f = builtin_example("c8", m1=2, m2=3)
    indexer = FixedPointIndexer(f, period=6)
    assert indexer.index(2).order == 3
    assert indexer.index(3).order == 4
    assert dold_index(f, 6, indexer) == 6
    assert orbit_count(f, 6, indexer) == 1


def test_c8_with_orders_three_and_five():
    f = builtin_example("c8", m1=3, m2=5)
    indexer = FixedPointIndexer(f, period=15)
    assert indexer.index(3).order == 4
    assert indexer.index(5).order == 6
    assert dold_index(f, 15, indexer) == 15
    assert orbit_count(f, 15, indexer) == 1


def test_cubic_reflection_has_four_two_orbits():
    f = GermMap.from_terms(Q, 16, {(1, 0): -1, (3, 0): 1}, {(0, 1): -1, (0, 3): 1})
    indexer = FixedPointIndexer(f, period=2)
    assert indexer.index(2).order == 9
    assert dold_index(f, 2, indexer) == 8
    assert orbit_count(f, 2, indexer) == 4


def test_hyperbolic_germ_has_no_periodic_orbits():
    f = GermMap.from_terms(Q, 16, {(1, 0): 2, (2, 0): 1}, {(0, 1): 3})
    assert orbit_count(f, 1) == 1
    assert dold_index(f, 2) == 0
    assert dold_index(f, 6) == 0


def test_index_consistency_on_e2():
    f = builtin_example("e2", k=2)
    report = index_consistency(f, 6)
    assert report.consistent
    assert report.recomputed_mu == 17
    assert report.recomputed_method == "dual_space"
    assert report.admissible_sum == 17
    assert report.off_admissible == {}


def test_off_admissible_index_is_reported():
    f = GermMap.from_terms(Q, 16, {(1, 0): 2}, {(0, 1): 3})
    with pytest.raises(IndexConsistencyError):
        dold_index(f, 2, ScriptedIndexer(f, {1: 1, 2: 3}))


def test_divisibility_is_enforced():
    f = GermMap.from_terms(Q, 16, {(1, 0): -1}, {(0, 1): 2})
    indexer = ScriptedIndexer(f, {1: 1, 2: 2})
    assert dold_index(f, 2, indexer) == 1
    with pytest.raises(DivisibilityError):
        orbit_count(f, 2, indexer)


def test_index_consistency_on_jordan_witness():
    F = witness_germ("b1p", LinearSpec(2, 1, 1, diagonalizable=False), 2)
    report = index_consistency(F, 2)
    assert report.recomputed_mu == 3
    assert [row.dold for row in report.table.rows] == [1, 2]
    assert report.admissible_sum == 3


# --- randomized identities -------------------------------------------------------------

def _nonzero(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))


def random_coordinate_change(f: GermMap, rng: random.Random) -> GermMap:
    """Diagonal rational linear part plus a few terms of degree 2 and 3"""
    components = []
    for linear in ((1, 0), (0, 1)):
        terms = {linear: _nonzero(rng)}
        for _ in range(3):
            degree = rng.randint(2, 3)
            i1 = rng.randint(0, degree)
            terms[(i1, degree - i1)] = _nonzero(rng)
        components.append(terms)
    return GermMap.from_terms(f.context, f.truncation, *components)


def _table(f: GermMap, M: int):
    report = dold_report(f, M)
    return [(row.period, row.mu, row.dold, row.orbits) for row in report.rows]


def test_conjugation_keeps_indices_and_orbit_counts():
    rng = random.Random(21)
    f = builtin_example("e2", k=2)
    expected = _table(f, 6)
    for _ in range(max(1, PROPERTY_CASES // 2)):
        H = random_coordinate_change(f, rng)
        assert _table(conjugate(f, H), 6) == expected


DIVISIBILITY_CELLS = [
    (LinearSpec(2, 1, 1), 2, "b1"),
    (LinearSpec(6, 2, 5), 6, "b3"),
    (LinearSpec(6, 3, 1), 6, "b3p"),
    (LinearSpec(6, 3, 2), 6, "b4p"),
]


def test_period_divides_dold_index_of_resonant_germs():
    rng = random.Random(22)
    for _ in range(PROPERTY_CASES):
        spec, M, case = rng.choice(DIVISIBILITY_CELLS)
        base = positive_witness(case, spec, M) if case in ("b1", "b3") else witness_germ(case, spec, M)
        g = random_resonant_perturbation(base, spec, M, rng)
        try:
            value = dold_index(g, M)
        except NonIsolatedFixedPointError:
            continue
        assert value % M == 0
        if case in ("b1", "b3"):
            assert value // M >= 2
