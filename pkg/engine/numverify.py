"""
Floating-point falsifier for hidden orbit counts

Perturb the germ (origin kept fixed), find period-M points near 0 by damped
Newton from low-discrepancy starts, group them into orbits and compare the
count with the exact engine.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.stats import qmc
from sympy import divisors

from config import config
from engine.errors import NumericVerificationError
from engine.exactnum import CycloNum
from engine.jet import GermMap
from engine.reports import NumericCount
from utils import debug_print, log_event

# Fraction of the cube [-1, 1]^4 occupied by the unit ball of C^2
_BALL_FRACTION = math.pi ** 2 / 32


class NumericConfig(BaseModel):
    """Search parameters; every field defaults to the environment config"""

    epsilons: List[float] = Field(default_factory=lambda: list(config.NUMERIC_EPSILONS))
    radius: float = Field(default_factory=lambda: config.NUMERIC_RADIUS)
    starts: int = Field(default_factory=lambda: config.NUMERIC_STARTS, ge=1)
    residual_tol: float = Field(default_factory=lambda: config.NUMERIC_RESIDUAL_TOL)
    cluster_tol: float = Field(default_factory=lambda: config.NUMERIC_CLUSTER_TOL)
    newton_steps: int = Field(default_factory=lambda: config.NUMERIC_NEWTON_STEPS, ge=1)
    seed: int = Field(default_factory=lambda: config.DEFAULT_SEED)

    @field_validator("epsilons")
    @classmethod
    def positive_epsilons(cls, value: List[float]) -> List[float]:
        if not value or min(value) <= 0:
            raise ValueError("epsilons must be a non-empty list of positive numbers")
        return value

    @model_validator(mode="after")
    def ordered_tolerances(self) -> "NumericConfig":
        if not 0 < self.residual_tol < self.cluster_tol < self.radius:
            raise ValueError(
                f"need 0 < residual_tol < cluster_tol < radius, got "
                f"{self.residual_tol}, {self.cluster_tol}, {self.radius}"
            )
        return self


@dataclass
class FloatGerm:
    """
    Complex double-precision germ: per component an (n, 2) exponent array and
    an (n,) coefficient array, no constant terms
    """

    exponents: Tuple[np.ndarray, np.ndarray]
    coefficients: Tuple[np.ndarray, np.ndarray]
    embedding_error: float = 0.0

    def __post_init__(self):
        for exps in self.exponents:
            if len(exps) and np.any(exps.sum(axis=1) == 0):
                raise NumericVerificationError("a float germ must not have constant terms")

    @property
    def degree(self) -> int:
        return max((int(e.sum(axis=1).max()) for e in self.exponents if len(e)), default=0)

    @classmethod
    def from_terms(cls, first: dict, second: dict) -> "FloatGerm":
        """Build from {(i1, i2): complex} maps"""
        exponents, coefficients = [], []
        for terms in (first, second):
            keys = sorted(terms)
            exponents.append(np.array(keys, dtype=np.int64).reshape(-1, 2))
            coefficients.append(np.array([terms[k] for k in keys], dtype=np.complex128))
        return cls(tuple(exponents), tuple(coefficients))

    def terms(self) -> List[dict]:
        return [
            {(int(i1), int(i2)): complex(c) for (i1, i2), c in zip(exps, coeffs)}
            for exps, coeffs in zip(self.exponents, self.coefficients)
        ]

    def __add__(self, other: "FloatGerm") -> "FloatGerm":
        merged = []
        for mine, theirs in zip(self.terms(), other.terms()):
            total = dict(mine)
            for key, value in theirs.items():
                total[key] = total.get(key, 0) + value
            merged.append(total)
        germ = FloatGerm.from_terms(*merged)
        germ.embedding_error = self.embedding_error + other.embedding_error
        return germ

    def scaled(self, factor: float) -> "FloatGerm":
        return FloatGerm(self.exponents, tuple(c * factor for c in self.coefficients), self.embedding_error)

    def evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Values (K, 2) and Jacobians (K, 2, 2) at K points
        """
        x1 = points[:, 0:1]
        x2 = points[:, 1:2]
        values = np.zeros(points.shape, dtype=np.complex128)
        jac = np.zeros((points.shape[0], 2, 2), dtype=np.complex128)
        for j, (exps, coeffs) in enumerate(zip(self.exponents, self.coefficients)):
            if not len(exps):
                continue
            i1, i2 = exps[:, 0], exps[:, 1]
            p1, p2 = x1 ** i1, x2 ** i2
            values[:, j] = (p1 * p2) @ coeffs
            d1 = np.where(i1 > 0, i1 * x1 ** np.maximum(i1 - 1, 0), 0) * p2
            d2 = p1 * np.where(i2 > 0, i2 * x2 ** np.maximum(i2 - 1, 0), 0)
            jac[:, j, 0] = d1 @ coeffs
            jac[:, j, 1] = d2 @ coeffs
        return values, jac


def _principal_powers(level: int) -> np.ndarray:
    """exp(2 pi i k / L) for k < L, exact on the real and imaginary axes"""
    k = np.arange(level)
    powers = np.exp(2j * np.pi * k / level)
    for index in range(level):
        if (4 * index) % level == 0:
            powers[index] = 1j ** (4 * index // level)
    return powers


def _embed_coefficient(value: CycloNum, powers: np.ndarray) -> Tuple[complex, float]:
    coeffs = value.coeffs
    number = sum(float(c) * powers[i] for i, c in enumerate(coeffs) if c)
    error = float(sum(abs(float(c)) for c in coeffs)) * np.finfo(float).eps * (len(coeffs) + 1)
    return complex(number), error


def embed(f: GermMap) -> FloatGerm:
    """
    Principal embedding zeta_L -> exp(2 pi i / L); the worst coefficient
    error bound is kept on the result as embedding_error
    """
    powers = _principal_powers(f.context.level)
    components = []
    worst = 0.0
    for component in f.components:
        terms = {}
        for exponent, value in component.items():
            terms[exponent], error = _embed_coefficient(value, powers)
            worst = max(worst, error)
        components.append(terms)
    germ = FloatGerm.from_terms(*components)
    germ.embedding_error = worst
    return germ


def _orbit_batch(g: FloatGerm, points: np.ndarray, M: int) -> Tuple[np.ndarray, np.ndarray]:
    """Orbits (K, M+1, 2) and chain-rule Jacobians of g^M (K, 2, 2)"""
    orbit = np.empty((points.shape[0], M + 1, 2), dtype=np.complex128)
    orbit[:, 0] = points
    jac = np.broadcast_to(np.eye(2, dtype=np.complex128), (points.shape[0], 2, 2)).copy()
    x = points
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, M + 1):
            x, local = g.evaluate(x)
            jac = local @ jac
            orbit[:, step] = x
    return orbit, jac


def orbit_eval(g: FloatGerm, x: Sequence[complex], M: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    The points x, g(x), ..., g^M(x) and the Jacobian of g^M at x

    Raises:
        NumericVerificationError: the orbit overflows
    """
    if M < 1:
        raise NumericVerificationError(f"period must be positive, got {M}")
    start = np.asarray(x, dtype=np.complex128).reshape(1, 2)
    orbit, jac = _orbit_batch(g, start, M)
    if not (np.all(np.isfinite(orbit)) and np.all(np.isfinite(jac))):
        raise NumericVerificationError(f"orbit of {tuple(start[0])} diverges within {M} steps")
    return orbit[0], jac[0]


@dataclass
class PeriodicPoint:
    point: np.ndarray
    period: int
    residual: float
    condition: float


@dataclass
class PeriodSearch:
    """Certified period points (any minimal period dividing M) and diagnostics"""

    period: int
    points: List[PeriodicPoint] = field(default_factory=list)
    uncertified: int = 0
    max_residual: float = 0.0

    def with_period(self, m: int) -> List[PeriodicPoint]:
        return [p for p in self.points if p.period == m]


def _starts(cfg: NumericConfig) -> np.ndarray:
    """cfg.starts low-discrepancy points of the ball of radius rho in C^2"""
    sampler = qmc.Halton(d=4, scramble=True, seed=cfg.seed)
    raw = math.ceil(cfg.starts / _BALL_FRACTION) + 64
    cube = qmc.scale(sampler.random(raw), -cfg.radius * np.ones(4), cfg.radius * np.ones(4))
    points = cube[:, 0:2] + 1j * cube[:, 2:4]
    inside = np.linalg.norm(points, axis=1) < cfg.radius
    return points[inside][: cfg.starts]


def _newton(g: FloatGerm, x: np.ndarray, M: int, cfg: NumericConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Damped batched Newton on g^M(x) - x; returns final points and alive mask"""
    alive = np.ones(x.shape[0], dtype=bool)
    max_step = cfg.radius / 4
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(cfg.newton_steps):
            orbit, jac = _orbit_batch(g, x, M)
            F = orbit[:, M] - x
            a = jac[:, 0, 0] - 1
            b = jac[:, 0, 1]
            c = jac[:, 1, 0]
            d = jac[:, 1, 1] - 1
            det = a * d - b * c
            delta = np.stack([(d * F[:, 0] - b * F[:, 1]) / det, (a * F[:, 1] - c * F[:, 0]) / det], axis=1)
            size = np.linalg.norm(delta, axis=1)
            scale = np.minimum(1.0, max_step / np.where(size > 0, size, 1.0))
            x = x - scale[:, None] * delta
            alive &= np.all(np.isfinite(x), axis=1) & (np.linalg.norm(x, axis=1) < 2 * cfg.radius)
            x[~alive] = 0
            if np.all(size[alive] < cfg.residual_tol * 1e-2):
                break
    return x, alive


def _cluster(points: np.ndarray, tol: float) -> List[int]:
    """Indices of one representative per tol-cluster, after a deterministic sort"""
    order = np.lexsort((points[:, 1].imag, points[:, 1].real, points[:, 0].imag, points[:, 0].real))
    representatives: List[int] = []
    for index in order:
        if representatives:
            distance = np.linalg.norm(points[representatives] - points[index], axis=1)
            if np.min(distance) < tol:
                continue
        representatives.append(int(index))
    return representatives


def _minimal_period(orbit: np.ndarray, M: int, tol: float) -> int:
    for m in divisors(M):
        if np.linalg.norm(orbit[int(m)] - orbit[0]) < tol:
            return int(m)
    return M


def find_period_points(g: FloatGerm, M: int, cfg: Optional[NumericConfig] = None) -> PeriodSearch:
    """
    Newton on g^M(x) - x from cfg.starts starts in the ball of radius rho

    Converged points (residual < residual_tol, |x| < rho) are deduplicated,
    given their minimal period, and certified when J(g^M) - I is
    well conditioned; the rest are counted as uncertified.
    """
    cfg = cfg or NumericConfig()
    x, alive = _newton(g, _starts(cfg), M, cfg)
    x = x[alive]
    search = PeriodSearch(period=M)
    if not len(x):
        return search
    orbit, jac = _orbit_batch(g, x, M)
    residual = np.linalg.norm(orbit[:, M] - x, axis=1)
    keep = (residual < cfg.residual_tol) & (np.linalg.norm(x, axis=1) < cfg.radius)
    x, orbit, jac, residual = x[keep], orbit[keep], jac[keep], residual[keep]
    if not len(x):
        return search
    search.max_residual = float(residual.max())
    identity = np.eye(2, dtype=np.complex128)
    for index in _cluster(x, cfg.cluster_tol):
        condition = float(np.linalg.cond(jac[index] - identity))
        if not np.isfinite(condition) or condition * cfg.residual_tol > cfg.cluster_tol:
            search.uncertified += 1
            continue
        search.points.append(
            PeriodicPoint(
                point=x[index],
                period=_minimal_period(orbit[index], M, cfg.cluster_tol),
                residual=float(residual[index]),
                condition=condition,
            )
        )
    debug_print(f"period {M}: {len(search.points)} certified points, {search.uncertified} uncertified")
    return search


def group_orbits(g: FloatGerm, points: List[PeriodicPoint], tol: float) -> List[List[PeriodicPoint]]:
    """Partition period points into g-orbits"""
    orbits: List[List[PeriodicPoint]] = []
    assigned = [False] * len(points)
    for i, p in enumerate(points):
        if assigned[i]:
            continue
        trajectory, _ = _orbit_batch(g, p.point.reshape(1, 2), p.period)
        members = []
        for j, q in enumerate(points):
            if not assigned[j] and np.min(np.linalg.norm(trajectory[0, :-1] - q.point, axis=1)) < tol:
                assigned[j] = True
                members.append(q)
        orbits.append(members)
    return orbits


def _random_perturbation(rng: np.random.Generator) -> FloatGerm:
    """Random complex terms of degree 1 and 2 (unit scale)"""
    monomials = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    components = []
    for _ in range(2):
        values = rng.standard_normal(len(monomials)) + 1j * rng.standard_normal(len(monomials))
        components.append(dict(zip(monomials, values)))
    return FloatGerm.from_terms(*components)


def _epsilon_search(task: Tuple[FloatGerm, int, NumericConfig, float]) -> Tuple[int, int, int, float]:
    """One perturbation size: (orbits, period points, uncertified, max residual)"""
    g, M, cfg, eps = task
    search = find_period_points(g, M, cfg)
    period_points = search.with_period(M)
    orbits = group_orbits(g, period_points, cfg.cluster_tol)
    log_event("numeric_search", period=M, eps=eps, orbits=len(orbits), points=len(period_points))
    return len(orbits), len(period_points), search.uncertified, search.max_residual


def numeric_orbit_count(
    f: GermMap,
    M: int,
    cfg: Optional[NumericConfig] = None,
    exact: Optional[int] = None,
    threads: int = 1,
) -> NumericCount:
    """
    Count period-M orbits of f + eps * (random degree 1-2 terms) for each eps

    The count is reported only when all eps decades agree. With threads > 1
    the eps searches run in worker processes.
    """
    cfg = cfg or NumericConfig()
    if threads < 1:
        raise NumericVerificationError(f"threads must be at least 1, got {threads}")
    base = embed(f)
    rng = np.random.default_rng(cfg.seed)
    direction = _random_perturbation(rng)
    tasks = [(base + direction.scaled(eps), M, cfg, eps) for eps in cfg.epsilons]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            results = list(pool.map(_epsilon_search, tasks))
    else:
        results = [_epsilon_search(task) for task in tasks]
    counts = [orbits for orbits, _, _, _ in results]
    agree = len(set(counts)) == 1
    return NumericCount(
        period=M,
        epsilons=list(cfg.epsilons),
        counts=counts,
        points=[points for _, points, _, _ in results],
        uncertified=[uncertified for _, _, uncertified, _ in results],
        max_residual=max(residual for _, _, _, residual in results),
        embedding_error=base.embedding_error,
        agree=agree,
        count=counts[0] if agree else None,
        exact=exact,
    )
