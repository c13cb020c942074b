#!/usr/bin/env python3
"""
Tests for zero orders (Cronin fast path, dual-space oracle) and fixed-point
indices, including the corollary instances and randomized identities
"""
import os
import random
from fractions import Fraction

import pytest

from engine.classify import builtin_example
from engine.errors import DeterminacyError, NonIsolatedFixedPointError, ZeroComponentError
from engine.exactnum import get_context
from engine.jet import GermMap, Jet2, compose, substitute_powers
from engine.multiplicity import (
    FixedPointIndexer,
    cronin_zero_order,
    dual_space_zero_order,
    fixed_point_index,
    forms_coprime,
    lowest_forms,
    zero_order,
)

PROPERTY_CASES = int(os.getenv("PROPERTY_CASES", "4"))

Q = get_context(1)


def germ(first, second, D=16, context=Q):
    return GermMap.from_terms(context, D, first, second)


def pi(g: GermMap) -> int:
    return zero_order(g).order


def _nonzero(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))


def _higher_terms(rng: random.Random, low: int, high: int, count: int) -> dict:
    terms = {}
    for _ in range(count):
        degree = rng.randint(low, high)
        i1 = rng.randint(0, degree)
        terms[(i1, degree - i1)] = _nonzero(rng)
    return terms


def coprime_germ(rng: random.Random, D: int = 20, max_order: int = 2) -> GermMap:
    """Lowest forms x1^m1 + c x1^(m1-1) x2 and x2^m2, always coprime"""
    m1, m2 = rng.randint(1, max_order), rng.randint(1, max_order)
    first = {**_higher_terms(rng, m1 + 1, m1 + 2, 2), (m1, 0): 1, (m1 - 1, 1): _nonzero(rng)}
    second = {**_higher_terms(rng, m2 + 1, m2 + 2, 2), (0, m2): 1}
    return germ(first, second, D)


# --- corollary instance builders -------------------------------------------------

def corollary_c1(d: int, m1: int, a=(1, 1, 1), D: int = 24) -> GermMap:
    """(a1 x1^(m1+1) + a2 x2^d, a3 x1^m1 x2): pi = d m1 + m1 + 1 when all a_i != 0"""
    a1, a2, a3 = a
    return germ({(m1 + 1, 0): a1, (0, d): a2}, {(m1, 1): a3}, D)


def corollary_c2(m: int, a, b, c, D: int = 16) -> GermMap:
    """(a x1^m + c x2, b x2 + x1^(m+1)): pi = m when a, b != 0"""
    return germ({(m, 0): a, (0, 1): c}, {(0, 1): b, (m + 1, 0): 1}, D)


def corollary_c3(n1: int, n2: int, u, D: int = 24) -> GermMap:
    """Both components combine x1^n1 and x2^n2: pi >= n1 n2"""
    return germ({(n1, 0): u[0], (0, n2): u[1]}, {(n1, 0): u[2], (0, n2): u[3]}, D)


def corollary_c5(n1: int, n2: int, r: int, u, D: int = 24) -> GermMap:
    """(x1^n1 (u0 x1^(r n1) + u1 x2^n2), x2^n2 (u2 x1^n1 + u3 x2^(r n2))): pi >= 2 n1 n2 + 2 r n1 n2"""
    return germ(
        {(n1 + r * n1, 0): u[0], (n1, n2): u[1]},
        {(n1, n2): u[2], (0, n2 + r * n2): u[3]},
        D,
    )


def corollary_dd4(d: int, n1: int, n2: int, o, D: int = 24) -> GermMap:
    """The dd4 shape with a11 = a22 = 1 and a12 = a21 = 1; pi >= 2 d n1 n2 + d n1 + d n2 + 1"""
    first = {
        (d * n1 + 1, 0): 1,
        (n1 + 1, n2): o[0],
        (1, d * n2): o[1],
        (0, 2 * d * n2 + 1): 1,
    }
    second = {
        (d * n1, 1): o[2],
        (n1, n2 + 1): o[3],
        (0, d * n2 + 1): 1,
        (2 * d * n1 + 1, 0): 1,
    }
    return germ(first, second, D)


# --- examples ---------------------------------------------------------------------

def test_lowest_forms_examples():
    forms = lowest_forms(germ({(2, 0): 1, (0, 3): 1}, {(0, 1): 1}))
    assert forms.degrees == (2, 1)
    assert forms.form1.terms == {(2, 0): Q.one()}

    forms = lowest_forms(germ({(1, 1): 1, (3, 0): 1}, {(2, 0): 1, (0, 2): 1}))
    assert forms.degrees == (2, 2)


def test_lowest_forms_of_e2_square_displacement():
    f = builtin_example("e2", k=2)
    g = FixedPointIndexer(f, period=2).iterate_at(2, 16).displacement()
    assert lowest_forms(g).degrees == (4, 1)


def test_lowest_forms_zero_component():
    with pytest.raises(ZeroComponentError):
        lowest_forms(germ({(1, 0): 1}, {}))


def test_forms_coprime_examples():
    assert forms_coprime(lowest_forms(germ({(2, 0): 1, (0, 2): 1}, {(1, 1): 1})))
    assert not forms_coprime(lowest_forms(germ({(1, 1): 1}, {(2, 0): 1})))
    assert not forms_coprime(lowest_forms(germ({(3, 0): 1, (0, 3): -1}, {(1, 0): 1, (0, 1): -1})))


def test_cronin_examples():
    assert cronin_zero_order(germ({(2, 0): 1, (0, 2): 1}, {(1, 1): 1})).order == 4
    assert cronin_zero_order(germ({(1, 0): 1}, {(0, 1): 1})).order == 1
    assert cronin_zero_order(germ({(3, 0): 1}, {(0, 2): 1})).order == 6
    assert cronin_zero_order(germ({(1, 1): 1}, {(2, 0): 1})) is None


def test_dual_space_examples():
    result = dual_space_zero_order(germ({(2, 0): 1}, {(0, 3): 1}))
    assert result.order == 6
    assert result.trusted
    assert dual_space_zero_order(germ({(3, 0): 1, (0, 2): -1}, {(0, 1): 1})).order == 3
    assert dual_space_zero_order(germ({(2, 0): 1, (0, 3): -1}, {(0, 2): 1, (3, 0): -1})).order == 4


def test_zero_order_examples():
    simple = GermMap.identity(Q, 8) - germ({(1, 0): 2}, {(0, 1): 3}, D=8)
    assert zero_order(simple).order == 1
    assert zero_order(corollary_c1(2, 2)).order == 7
    declined = zero_order(germ({(3, 0): 1, (0, 2): -1}, {(0, 1): 1}))
    assert declined.order == 3


def test_fixed_point_index_examples():
    assert fixed_point_index(germ({(1, 0): 2}, {(0, 1): 3}), 1).order == 1

    f = builtin_example("e2", k=2)
    indexer = FixedPointIndexer(f, period=6)
    assert indexer.index(2).order == 5
    assert indexer.index(3).order == 7
    assert indexer.index(6).order == 17

    F = germ({(1, 0): -1, (0, 3): 1}, {(1, 0): 1, (0, 1): -1})
    assert fixed_point_index(F, 2).order == 3


def test_indexer_memoizes():
    f = builtin_example("e2", k=2)
    indexer = FixedPointIndexer(f, period=2)
    first = indexer.index(2)
    assert indexer.index(2) is first


def test_non_isolated_fixed_point_is_reported():
    f = germ({(1, 0): 1, (1, 1): 1}, {(0, 1): 1, (0, 2): 1})
    with pytest.raises(NonIsolatedFixedPointError):
        fixed_point_index(f, 1)


# --- corollary golden values ---------------------------------------------------------

@pytest.mark.parametrize("d,m1", [(2, 2), (3, 1), (2, 3), (4, 2)])
def test_corollary_c1_equality(d, m1):
    assert pi(corollary_c1(d, m1)) == d * m1 + m1 + 1


def test_corollary_c1_random_coefficients():
    rng = random.Random(101)
    for _ in range(PROPERTY_CASES):
        d, m1 = rng.randint(1, 3), rng.randint(1, 3)
        a = [_nonzero(rng) for _ in range(3)]
        assert pi(corollary_c1(d, m1, a)) == d * m1 + m1 + 1


@pytest.mark.parametrize("m", [2, 3, 5])
def test_corollary_c2_equality(m):
    assert pi(corollary_c2(m, 1, 2, 5)) == m


def test_corollary_c3_lower_bound():
    rng = random.Random(103)
    for _ in range(PROPERTY_CASES):
        n1, n2 = rng.randint(1, 3), rng.randint(1, 3)
        u = [_nonzero(rng) for _ in range(4)]
        if u[0] * u[3] == u[1] * u[2]:
            continue
        assert pi(corollary_c3(n1, n2, u)) >= n1 * n2


def test_corollary_c5_instances():
    g = corollary_c5(2, 3, 1, (1, 2, 1, 1))
    assert pi(g) == 2 * 6 + 2 * 6
    rng = random.Random(105)
    for _ in range(PROPERTY_CASES):
        n1, n2, r = rng.randint(1, 2), rng.randint(1, 2), 1
        u = [_nonzero(rng) for _ in range(4)]
        if u[0] * u[3] == u[1] * u[2]:
            continue
        assert pi(corollary_c5(n1, n2, r, u)) >= 2 * n1 * n2 + 2 * r * n1 * n2


def test_lemma_dd4_lower_bound():
    d, n1, n2 = 2, 2, 2
    bound = 2 * d * n1 * n2 + d * n1 + d * n2 + 1
    assert pi(corollary_dd4(d, n1, n2, (0, 0, 0, 0))) == bound
    rng = random.Random(107)
    for _ in range(max(1, PROPERTY_CASES // 2)):
        o = [_nonzero(rng) for _ in range(4)]
        try:
            assert pi(corollary_dd4(d, n1, n2, o)) >= bound
        except DeterminacyError:
            continue


# --- randomized identities -------------------------------------------------------------

def test_fast_path_agrees_with_oracle():
    rng = random.Random(1)
    for _ in range(PROPERTY_CASES * 2):
        g = coprime_germ(rng, D=20, max_order=3)
        fast = cronin_zero_order(g)
        assert fast is not None
        assert dual_space_zero_order(g).order == fast.order


def test_composition_multiplicativity():
    rng = random.Random(2)
    for _ in range(PROPERTY_CASES):
        h1, h2 = coprime_germ(rng), coprime_germ(rng)
        assert pi(compose(h1, h2)) == pi(h1) * pi(h2)


def test_component_product_additivity():
    rng = random.Random(3)
    for _ in range(PROPERTY_CASES):
        f1 = Jet2(Q, 20, {(1, 0): 1, **_higher_terms(rng, 2, 3, 2)})
        f2 = Jet2(Q, 20, {(1, 0): 1, (0, 1): _nonzero(rng), **_higher_terms(rng, 2, 3, 2)})
        h = Jet2(Q, 20, {(0, 2): 1, (3, 0): _nonzero(rng), **_higher_terms(rng, 4, 4, 1)})
        assert pi(GermMap(f1 * f2, h)) == pi(GermMap(f1, h)) + pi(GermMap(f2, h))


def test_unit_matrix_invariance():
    rng = random.Random(4)
    for _ in range(PROPERTY_CASES):
        g = coprime_germ(rng)
        g1, g2 = g.components
        while True:
            a = [_nonzero(rng) for _ in range(4)]
            if a[0] * a[3] != a[1] * a[2]:
                break
        entries = [Jet2(Q, 20, {(0, 0): c, (1, 0): _nonzero(rng)}) for c in a]
        f = GermMap(g1 * entries[0] + g2 * entries[2], g1 * entries[1] + g2 * entries[3])
        assert pi(f) == pi(g)


def tangent_pair(rng: random.Random, D: int = 20):
    """f1, f2 tangent to x2 = 0 and h with lowest form x2^2, so every lowest form shares x2"""
    f1 = Jet2(Q, D, {(0, 1): 1, (2, 0): _nonzero(rng), **_higher_terms(rng, 3, 4, 2)})
    f2 = Jet2(Q, D, {(0, 1): 1, (2, 0): _nonzero(rng), **_higher_terms(rng, 3, 4, 2)})
    h = Jet2(Q, D, {(0, 2): 1, (3, 0): _nonzero(rng), **_higher_terms(rng, 4, 5, 2)})
    return f1, f2, h


def test_component_product_additivity_on_shared_forms():
    rng = random.Random(13)
    for _ in range(PROPERTY_CASES):
        f1, f2, h = tangent_pair(rng)
        first, second = zero_order(GermMap(f1, h)), zero_order(GermMap(f2, h))
        product = zero_order(GermMap(f1 * f2, h))
        assert {first.method, second.method, product.method} == {"dual_space"}
        assert (first.order, second.order) == (3, 3)
        assert product.order == first.order + second.order


def test_unit_matrix_invariance_on_shared_forms():
    rng = random.Random(14)
    for _ in range(PROPERTY_CASES):
        g1, _, g2 = tangent_pair(rng)
        while True:
            a = [_nonzero(rng) for _ in range(4)]
            if a[0] * a[3] != a[1] * a[2]:
                break
        entries = [Jet2(Q, 20, {(0, 0): c, (1, 0): _nonzero(rng)}) for c in a]
        f = GermMap(g1 * entries[0] + g2 * entries[2], g1 * entries[1] + g2 * entries[3])
        result = zero_order(f)
        assert result.method == "dual_space"
        assert result.order == zero_order(GermMap(g1, g2)).order == 3


def test_power_substitution_scaling():
    rng = random.Random(6)
    for _ in range(PROPERTY_CASES):
        g = coprime_germ(rng, D=12)
        a, b = rng.randint(1, 2), rng.randint(1, 3)
        assert pi(substitute_powers(g, a, b)) == a * b * pi(g)


def test_index_is_one_iff_no_eigenvalue_one():
    assert fixed_point_index(germ({(1, 0): 2, (2, 0): 1}, {(0, 1): -1, (0, 2): 1}), 1).order == 1
    assert fixed_point_index(germ({(1, 0): 1, (2, 0): 1}, {(0, 1): -1}), 1).order == 2


def test_shub_sullivan_invariance():
    f = germ({(1, 0): 1, (2, 0): 1}, {(0, 1): 2, (1, 1): 1})
    indexer = FixedPointIndexer(f, period=4)
    assert indexer.index(1).order == 2
    for m in (2, 3, 4):
        assert indexer.index(m).order == 2


def test_shub_sullivan_on_random_germs():
    rng = random.Random(8)
    for _ in range(PROPERTY_CASES):
        k = rng.randint(2, 3)
        first = {(1, 0): 1, (k, 0): _nonzero(rng)}
        for _ in range(2):
            degree = rng.randint(k, k + 1)
            i2 = rng.randint(1, degree)
            first[(degree - i2, i2)] = _nonzero(rng)
        second = {(0, 1): rng.choice([2, 3, -2, Fraction(1, 2)]), **_higher_terms(rng, 2, 3, 2)}
        f = germ(first, second)
        indexer = FixedPointIndexer(f, period=4)
        assert indexer.index(1).order == k
        for m in (2, 3, 4):
            assert indexer.index(m).order == k
