#!/usr/bin/env python3
"""
Tests for the floating-point orbit search
"""
import numpy as np
import pytest
from pydantic import ValidationError

from engine.classify import LinearSpec, builtin_example, positive_witness
from engine.dold import orbit_count
from engine.errors import NumericVerificationError
from engine.exactnum import get_context
from engine.jet import GermMap
from engine.numverify import (
    _random_perturbation,
    FloatGerm,
    NumericConfig,
    PeriodicPoint,
    embed,
    find_period_points,
    group_orbits,
    numeric_orbit_count,
    orbit_eval,
)

Q = get_context(1)
C3 = get_context(3)


def small_config(**overrides) -> NumericConfig:
    settings = {"epsilons": [1e-3, 1e-4], "starts": 50, "newton_steps": 30, "seed": 3}
    settings.update(overrides)
    return NumericConfig(**settings)


def test_embed_values():
    f = GermMap.from_terms(C3, 6, {(1, 0): C3.zeta(1), (2, 0): 1}, {(0, 1): C3.zeta(2)})
    g = embed(f)
    first, second = g.terms()
    assert first[(1, 0)] == pytest.approx(np.exp(2j * np.pi / 3))
    assert first[(2, 0)] == 1
    assert second[(0, 1)] == pytest.approx(np.exp(4j * np.pi / 3))
    assert 0 <= g.embedding_error < 1e-12
    assert g.degree == 2


def test_embed_is_exact_on_the_axes():
    c4 = get_context(4)
    g = embed(GermMap.from_terms(c4, 4, {(1, 0): c4.zeta(1)}, {(0, 1): c4.zeta(2)}))
    first, second = g.terms()
    assert first[(1, 0)] == 1j
    assert second[(0, 1)] == -1


def test_float_germ_rejects_constants():
    with pytest.raises(NumericVerificationError):
        FloatGerm.from_terms({(0, 0): 1.0}, {(0, 1): 1.0})


def test_evaluate_values_and_jacobian():
    g = FloatGerm.from_terms({(1, 0): 2.0, (1, 1): 1.0}, {(0, 2): 3.0})
    values, jac = g.evaluate(np.array([[1.0 + 0j, 2.0 + 0j]]))
    assert values[0] == pytest.approx([4.0, 12.0])
    assert jac[0] == pytest.approx(np.array([[4.0, 1.0], [0.0, 12.0]]))


def test_orbit_eval_linear():
    f = GermMap.from_terms(C3, 4, {(1, 0): -1}, {(0, 1): C3.zeta(1)})
    orbit, jac = orbit_eval(embed(f), (0.1, 0), 2)
    assert orbit.shape == (3, 2)
    assert orbit[2] == pytest.approx([0.1, 0])
    assert jac == pytest.approx(np.diag([1, np.exp(4j * np.pi / 3)]))


def test_orbit_eval_errors():
    g = FloatGerm.from_terms({(1, 0): 2.0, (2, 0): 1.0}, {(0, 1): 2.0})
    with pytest.raises(NumericVerificationError):
        orbit_eval(g, (0.1, 0), 0)
    with pytest.raises(NumericVerificationError):
        orbit_eval(g, (1e3, 0), 20)


def test_config_validation():
    with pytest.raises(ValidationError):
        NumericConfig(epsilons=[])
    with pytest.raises(ValidationError):
        NumericConfig(epsilons=[1e-3, -1e-4])
    with pytest.raises(ValidationError):
        NumericConfig(residual_tol=1e-3, cluster_tol=1e-6)
    with pytest.raises(ValidationError):
        NumericConfig(starts=0)
    assert NumericConfig(radius=0.5).radius == 0.5


def test_group_orbits_of_a_reflection():
    g = FloatGerm.from_terms({(1, 0): -1.0}, {(0, 1): -1.0})
    points = [
        PeriodicPoint(point=np.array([0.1, 0.0], dtype=np.complex128), period=2, residual=0.0, condition=1.0),
        PeriodicPoint(point=np.array([-0.1, 0.0], dtype=np.complex128), period=2, residual=0.0, condition=1.0),
        PeriodicPoint(point=np.array([0.0, 0.2], dtype=np.complex128), period=2, residual=0.0, condition=1.0),
    ]
    orbits = group_orbits(g, points, 1e-6)
    assert sorted(len(orbit) for orbit in orbits) == [1, 2]


def test_hyperbolic_germ_has_only_the_origin():
    g = embed(GermMap.from_terms(Q, 4, {(1, 0): 2}, {(0, 1): 3}))
    search = find_period_points(g, 2, small_config())
    assert search.with_period(2) == []
    fixed = search.with_period(1)
    assert len(fixed) == 1
    assert np.linalg.norm(fixed[0].point) < 1e-8


def test_numeric_count_of_hyperbolic_germ():
    f = GermMap.from_terms(Q, 4, {(1, 0): 2, (2, 0): 1}, {(0, 1): 3})
    count = numeric_orbit_count(f, 2, small_config(), exact=0)
    assert count.agree
    assert count.count == 0
    assert count.exact == 0
    assert count.counts == [0, 0]


def reflection_witness() -> GermMap:
    return positive_witness("b1", LinearSpec(2, 1, 1), 2)


def test_reflection_witness_period_points():
    cfg = NumericConfig()
    direction = _random_perturbation(np.random.default_rng(cfg.seed))
    g = embed(reflection_witness()) + direction.scaled(1e-3)
    search = find_period_points(g, 2, cfg)
    period_two = search.with_period(2)
    assert len(period_two) == 8
    assert len(group_orbits(g, period_two, cfg.cluster_tol)) == 4
    assert all(np.linalg.norm(p.point) < cfg.cluster_tol for p in search.with_period(1))


@pytest.mark.parametrize("M,expected", [(2, 2), (3, 2), (6, 1)])
def test_numeric_count_matches_e2(M, expected):
    f = builtin_example("e2", k=2)
    exact = orbit_count(f, M)
    assert exact == expected
    count = numeric_orbit_count(f, M, NumericConfig(), exact=exact)
    assert count.agree
    assert count.counts == [expected] * len(count.epsilons)
    assert count.count == exact


def test_numeric_count_matches_reflection_witness():
    f = reflection_witness()
    count = numeric_orbit_count(f, 2, NumericConfig(), exact=orbit_count(f, 2))
    assert count.exact == 4
    assert count.counts == [4] * len(count.epsilons)
    assert count.points == [8] * len(count.epsilons)


@pytest.mark.parametrize("name,M", [("b1", 2), ("e2", 2)])
def test_more_starts_never_lose_points(name, M):
    f = reflection_witness() if name == "b1" else builtin_example("e2", k=2)
    cfg = NumericConfig()
    doubled = NumericConfig(starts=2 * cfg.starts)
    direction = _random_perturbation(np.random.default_rng(cfg.seed))
    for eps in cfg.epsilons:
        g = embed(f) + direction.scaled(eps)
        base = len(find_period_points(g, M, cfg).with_period(M))
        assert len(find_period_points(g, M, doubled).with_period(M)) >= base


def test_worker_processes_give_the_same_count():
    f = GermMap.from_terms(Q, 4, {(1, 0): 2, (2, 0): 1}, {(0, 1): 3})
    serial = numeric_orbit_count(f, 2, small_config(), exact=0)
    pooled = numeric_orbit_count(f, 2, small_config(), exact=0, threads=2)
    assert pooled.model_dump() == serial.model_dump()
    with pytest.raises(NumericVerificationError):
        numeric_orbit_count(f, 2, small_config(), threads=0)
