"""
Condition (B) for a planar linear part and period M, witness germs for
every positive case and every counterexample family, builtin examples and
the end-to-end theorem scan
"""
import hashlib
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import divisors, isprime

from config import config
from engine.dold import dold_index, orbit_count, periods_from_orders
from engine.errors import (
    ClassificationError,
    EngineError,
    NonIsolatedFixedPointError,
    WitnessParameterError,
)
from engine.exactnum import CycloContext, CycloNum, RootOfUnity, get_context, power_relation
from engine.jet import Exponent, GermMap, Jet2, Matrix2, germ_to_document
from engine.multiplicity import FixedPointIndexer
from engine.reports import ScanCell, ScanCheck, ScanReport, VerdictB
from utils import debug_print, log_event

POSITIVE_CASES = ("b1", "b2", "b3", "b4")
COUNTEREXAMPLE_CASES = ("b0p", "b1p", "b2p", "b3p", "b4p")


@dataclass(frozen=True)
class LinearSpec:
    """
    Spectral data of a 2x2 linear part over Q(zeta_L)

    lambda_i = zeta_L^k_i; free_eigenvalue replaces lambda_2 by a rational
    that is not a root of unity.
    """

    level: int
    k1: int
    k2: int = 0
    diagonalizable: bool = True
    free_eigenvalue: Optional[Fraction] = None

    def __post_init__(self):
        if self.level < 1:
            raise ClassificationError(f"level must be positive, got {self.level}")
        object.__setattr__(self, "k1", self.k1 % self.level)
        object.__setattr__(self, "k2", self.k2 % self.level)
        if self.free_eigenvalue is not None:
            value = Fraction(self.free_eigenvalue)
            if value in (0, 1, -1):
                raise ClassificationError(f"free eigenvalue {value} must be a nonzero non-root of unity")
            object.__setattr__(self, "free_eigenvalue", value)
            object.__setattr__(self, "k2", 0)
        if not self.diagonalizable and (self.free_eigenvalue is not None or self.k1 != self.k2):
            raise ClassificationError("a non-diagonalizable linear part needs k1 == k2")

    @property
    def context(self) -> CycloContext:
        return get_context(self.level)

    @property
    def lambda1(self) -> CycloNum:
        return self.context.zeta(self.k1)

    @property
    def lambda2(self) -> CycloNum:
        if self.free_eigenvalue is not None:
            return self.context.rational(self.free_eigenvalue)
        return self.context.zeta(self.k2)

    @property
    def orders(self) -> Tuple[int, Optional[int]]:
        m1 = self.level // math.gcd(self.level, self.k1)
        m2 = None if self.free_eigenvalue is not None else self.level // math.gcd(self.level, self.k2)
        return m1, m2

    def matrix(self) -> Matrix2:
        if self.diagonalizable:
            return Matrix2.diagonal(self.lambda1, self.lambda2)
        zero, one = self.context.zero(), self.context.one()
        return Matrix2(self.lambda1, zero, one, self.lambda1)

    @property
    def label(self) -> str:
        if self.free_eigenvalue is not None:
            return f"L{self.level}:k({self.k1}):free={self.free_eigenvalue}"
        suffix = ":J" if not self.diagonalizable else ""
        return f"L{self.level}:k({self.k1},{self.k2}){suffix}"


@dataclass(frozen=True)
class _Eigen:
    order: int
    value: CycloNum
    exponent: int


def _sorted_eigen(spec: LinearSpec) -> Tuple[_Eigen, _Eigen, bool]:
    """Eigenvalues sorted so that m1 <= m2, plus whether the coordinates were swapped"""
    m1, m2 = spec.orders
    first = _Eigen(m1, spec.lambda1, spec.k1)
    second = _Eigen(m2, spec.lambda2, spec.k2)
    if m1 > m2:
        return second, first, True
    return first, second, False


def _power_pair(spec: LinearSpec) -> Tuple[Optional[int], Optional[int]]:
    r1 = RootOfUnity(spec.context, spec.k1)
    r2 = RootOfUnity(spec.context, spec.k2)
    return power_relation(r1, r2), power_relation(r2, r1)


def _verdict(M: int, spec: LinearSpec, outcome: str, case: Optional[str], detail: str, **certificate: int) -> VerdictB:
    return VerdictB(
        period=M,
        outcome=outcome,
        case=case,
        orders=list(spec.orders),
        certificate=certificate,
        detail=detail,
    )


def classify_linear(spec: LinearSpec, M: int) -> VerdictB:
    """
    Decide condition (B) for the linear part and the period M

    Orders are sorted (m1 <= m2) before the case dispatch.
    """
    if M <= 1:
        raise ClassificationError(f"period must exceed 1, got {M}")
    m1, m2 = spec.orders
    periods = periods_from_orders(m1, m2)
    if M not in periods:
        return _verdict(M, spec, "no_period_M", None, f"M={M} is not in the admissible periods {list(periods)}")

    if m2 is None or M % m1 or M % m2:
        root_order = m1 if m2 is None or M % m2 else m2
        if root_order != M:
            raise ClassificationError(f"M={M} admissible but no eigenvalue of order M in {spec.label}")
        return _verdict(
            M, spec, "not_guaranteed", "b0p",
            f"m={M}, the other eigenvalue is not an M-th root of unity", m=M,
        )

    low, high, _ = _sorted_eigen(spec)
    n1, n2 = low.order, high.order
    if n1 == n2 == M:
        if low.value == high.value:
            if spec.diagonalizable:
                return _verdict(M, spec, "guaranteed", "b1", f"m1=m2=M={M}, lambda1=lambda2, diagonalizable", m=M)
            return _verdict(M, spec, "not_guaranteed", "b1p", f"m1=m2=M={M}, lambda1=lambda2, Jordan block", m=M)
        alpha, beta = _power_pair(spec)
        if alpha is None or beta is None:
            raise ClassificationError(f"no power relation between eigenvalues of {spec.label}")
        product = alpha * beta
        if product > M + 1:
            return _verdict(
                M, spec, "guaranteed", "b2",
                f"alpha={alpha} beta={beta} alpha*beta={product}>M+1", alpha=alpha, beta=beta,
            )
        if product == M + 1:
            return _verdict(
                M, spec, "not_guaranteed", "b2p",
                f"alpha={alpha} beta={beta} alpha*beta=M+1", alpha=alpha, beta=beta,
            )
        raise ClassificationError(f"alpha*beta={product} < M+1 for {spec.label}")

    if n2 == M:
        d = M // n1
        if high.value ** d != low.value:
            return _verdict(M, spec, "guaranteed", "b3", f"m1={n1} m2={n2} d={d}, lambda2^d != lambda1", m1=n1, m2=n2, d=d)
        return _verdict(M, spec, "not_guaranteed", "b3p", f"m1={n1} m2={n2} d={d}, lambda2^d = lambda1", m1=n1, m2=n2, d=d)

    common = math.gcd(n1, n2)
    if common > 1:
        return _verdict(
            M, spec, "guaranteed", "b4",
            f"m1={n1} m2={n2} gcd={common} max={n2}<M", m1=n1, m2=n2, gcd=common,
        )
    return _verdict(M, spec, "not_guaranteed", "b4p", f"m1={n1} m2={n2} relatively prime", m1=n1, m2=n2, gcd=1)


def cases_holding(spec: LinearSpec, M: int) -> List[str]:
    """Which of the literal conditions (b1)-(b4) hold"""
    m1, m2 = spec.orders
    if m2 is None:
        return []
    low, high, _ = _sorted_eigen(spec)
    n1, n2 = low.order, high.order
    holding = []
    if spec.diagonalizable and n1 == n2 == M and low.value == high.value:
        holding.append("b1")
    if n1 == n2 == M and low.value != high.value:
        alpha, beta = _power_pair(spec)
        if alpha is not None and beta is not None and alpha * beta > M + 1:
            holding.append("b2")
    if n1 < n2 == M and n2 % n1 == 0 and high.value ** (n2 // n1) != low.value:
        holding.append("b3")
    if math.lcm(n1, n2) == M and math.gcd(n1, n2) > 1 and max(n1, n2) < M:
        holding.append("b4")
    return holding


# --- germ builders ----------------------------------------------------------------

def _witness_degree(M: int, terms: Sequence[Dict[Exponent, object]], truncation: Optional[int]) -> int:
    needed = max(sum(e) for component in terms for e in component)
    degree = truncation or max(config.TRUNCATION_FLOOR, 2 * M + 3)
    if degree < needed:
        raise WitnessParameterError(f"truncation {degree} is below the witness degree {needed}")
    return degree


def _build(
    context: CycloContext,
    M: int,
    first: Dict[Exponent, object],
    second: Dict[Exponent, object],
    truncation: Optional[int] = None,
    swap: bool = False,
) -> GermMap:
    degree = _witness_degree(M, (first, second), truncation)
    germ = GermMap(Jet2(context, degree, first), Jet2(context, degree, second))
    return germ.swapped() if swap else germ


def _require(condition: bool, message: str):
    if not condition:
        raise WitnessParameterError(message)


def _c8_terms(l1: CycloNum, l2: CycloNum, m1: int, m2: int, a: Sequence) -> Tuple[Dict, Dict]:
    a11, a12, a21, a22 = (Fraction(x) for x in a)
    _require(a11 != 0 and a22 != 0, "c8 needs a11 != 0 and a22 != 0")
    _require(a11 * a22 - a12 * a21 != 0, "c8 needs det(a) != 0")

    def component(linear_exp: Exponent, lam: CycloNum, b1: Fraction, b2: Fraction, x: Exponent) -> Dict:
        terms: Dict[Exponent, object] = {linear_exp: lam}
        for coeff, (e1, e2) in ((b1, (m1, 0)), (b2, (0, m2))):
            key = (x[0] + e1, x[1] + e2)
            terms[key] = terms.get(key, 0) + coeff
        return terms

    return (
        component((1, 0), l1, a11, a12, (1, 0)),
        component((0, 1), l2, a21, a22, (0, 1)),
    )


def witness_germ(
    case: str,
    spec: LinearSpec,
    M: int,
    a: Sequence = (1, 2, 1, 1),
    truncation: Optional[int] = None,
) -> GermMap:
    """
    Counterexample germ of family (b0)'-(b4)' with linear part spec.matrix()

    Raises:
        WitnessParameterError: the linear part or parameters do not fit the family
    """
    if case not in COUNTEREXAMPLE_CASES:
        raise WitnessParameterError(f"unknown counterexample family {case!r}")
    context = spec.context
    l1, l2 = spec.lambda1, spec.lambda2
    m1, m2 = spec.orders

    if case == "b0p":
        on_first = m1 == M
        _require(
            on_first or m2 == M,
            f"b0p needs an eigenvalue of order M={M}, got orders {spec.orders}",
        )
        other = m2 if on_first else m1
        _require(other is None or M % other != 0, "b0p needs the other eigenvalue to not be an M-th root of unity")
        if on_first:
            return _build(context, M, {(1, 0): l1, (M + 1, 0): 1}, {(0, 1): l2}, truncation)
        return _build(context, M, {(1, 0): l1}, {(0, 1): l2, (0, M + 1): 1}, truncation)

    _require(m2 is not None, f"{case} needs two roots of unity")

    if case == "b1p":
        _require(not spec.diagonalizable and m1 == M, f"b1p needs a Jordan block with eigenvalue order M={M}")
        return _build(context, M, {(1, 0): l1, (0, M + 1): 1}, {(1, 0): 1, (0, 1): l1}, truncation)

    _require(spec.diagonalizable, f"{case} needs a diagonalizable linear part")

    if case == "b2p":
        _require(m1 == m2 == M and l1 != l2, f"b2p needs distinct eigenvalues of order M={M}")
        alpha, beta = _power_pair(spec)
        _require(alpha * beta == M + 1, f"b2p needs alpha*beta = M+1, got {alpha}*{beta}")
        return _build(context, M, {(1, 0): l1, (0, beta): 1}, {(0, 1): l2, (alpha, 0): 1}, truncation)

    low, high, swap = _sorted_eigen(spec)
    n1, n2 = low.order, high.order

    if case == "b3p":
        _require(n1 < n2 == M and M % n1 == 0, f"b3p needs m1 | m2 = M={M}, got orders {spec.orders}")
        d = M // n1
        _require(high.value ** d == low.value, "b3p needs lambda2^d = lambda1")
        first = {(1, 0): low.value, (n1 + 1, 0): 1}
        first[(0, d)] = first.get((0, d), 0) + 1
        second = {(0, 1): high.value, (n1, 1): 1}
        return _build(context, M, first, second, truncation, swap)

    _require(
        1 < n1 < n2 and math.gcd(n1, n2) == 1 and M == n1 * n2,
        f"b4p needs relatively prime orders 1 < m1 < m2 with M = m1*m2, got {spec.orders} and M={M}",
    )
    first, second = _c8_terms(low.value, high.value, n1, n2, a)
    return _build(context, M, first, second, truncation, swap)


def positive_witness(case: str, spec: LinearSpec, M: int, truncation: Optional[int] = None) -> GermMap:
    """
    Resonant germ realizing a positive case (b1)-(b4)

    Raises:
        WitnessParameterError: the case does not hold for spec and M
    """
    if case not in POSITIVE_CASES:
        raise WitnessParameterError(f"unknown positive case {case!r}")
    _require(case in cases_holding(spec, M), f"case {case} does not hold for {spec.label} at M={M}")
    context = spec.context
    l1, l2 = spec.lambda1, spec.lambda2
    m1, m2 = spec.orders
    if case == "b1":
        return _build(context, M, {(1, 0): l1, (M + 1, 0): 1}, {(0, 1): l2, (0, M + 1): 1}, truncation)
    if case == "b2":
        alpha, beta = _power_pair(spec)
        return _build(context, M, {(1, 0): l1, (0, beta): 1}, {(0, 1): l2, (alpha, 0): 1}, truncation)
    return _build(context, M, {(1, 0): l1, (m1 + 1, 0): 1}, {(0, 1): l2, (0, m2 + 1): 1}, truncation)


def base_germ(spec: LinearSpec, M: int, truncation: Optional[int] = None) -> GermMap:
    """Generic germ with the given linear part (used where M is not a period)"""
    context = spec.context
    l1, l2 = spec.lambda1, spec.lambda2
    m1, m2 = spec.orders
    if not spec.diagonalizable:
        return _build(context, M, {(1, 0): l1, (0, m1 + 1): 1}, {(1, 0): 1, (0, 1): l1}, truncation)
    second = {(0, 1): l2}
    if m2 is not None:
        second[(0, m2 + 1)] = 1
    return _build(context, M, {(1, 0): l1, (m1 + 1, 0): 1}, second, truncation)


def builtin_example(name: str, **params) -> GermMap:
    """
    Named germs: e2 (k > 1), c8 (m1, m2 relatively prime, a) and e1
    (m1, m2 distinct primes)

    Raises:
        WitnessParameterError: invalid parameters
    """
    if name == "e2":
        k = int(params.get("k", 2))
        _require(k > 1, f"e2 needs k > 1, got {k}")
        context = get_context(6)
        first = {(1, 0): -1, (2 * k + 1, 0): 1, (1, 3): 1}
        second = {(0, 1): context.zeta(2), (2, 1): 1, (0, 3 * k + 1): 1}
        return _build(context, 6, first, second, params.get("truncation"))

    if name in ("c8", "e1"):
        m1, m2 = int(params.get("m1", 2)), int(params.get("m2", 3))
        _require(m1 >= 1 and m2 >= 1 and math.gcd(m1, m2) == 1, f"{name} needs relatively prime m1, m2, got ({m1}, {m2})")
        if name == "e1":
            _require(isprime(m1) and isprime(m2) and m1 != m2, f"e1 needs distinct primes, got ({m1}, {m2})")
            a = (1, 0, 0, 1)
        else:
            a = params.get("a") or (1, 2, 1, 1)
            _require(len(a) == 4, "c8 needs four coefficients a11,a12,a21,a22")
        context = get_context(m1 * m2)
        first, second = _c8_terms(context.zeta(m2), context.zeta(m1), m1, m2, a)
        return _build(context, m1 * m2, first, second, params.get("truncation"))

    raise WitnessParameterError(f"unknown builtin example {name!r} (expected e2, c8 or e1)")


# --- theorem scan ---------------------------------------------------------------------

def resonant_monomials(spec: LinearSpec, max_degree: int) -> List[Tuple[int, int, int]]:
    """(j, i1, i2) with 2 <= i1+i2 <= max_degree and lambda_j = lambda1^i1 lambda2^i2"""
    l1, l2 = spec.lambda1, spec.lambda2
    found = []
    for degree in range(2, max_degree + 1):
        for i2 in range(degree + 1):
            i1 = degree - i2
            value = l1 ** i1 * l2 ** i2
            for j, target in ((1, l1), (2, l2)):
                if value == target:
                    found.append((j, i1, i2))
    return found


def random_resonant_perturbation(germ: GermMap, spec: LinearSpec, M: int, rng: random.Random) -> GermMap:
    """Add up to three resonant monomials of degree <= M+1 with small rational coefficients"""
    candidates = resonant_monomials(spec, M + 1)
    if not candidates:
        return germ
    chosen = rng.sample(candidates, min(len(candidates), rng.randint(1, 3)))
    extra: List[Dict[Exponent, object]] = [{}, {}]
    for j, i1, i2 in chosen:
        numerator = rng.choice([-3, -2, -1, 1, 2, 3])
        extra[j - 1][(i1, i2)] = Fraction(numerator, rng.randint(1, 3))
    context, degree = germ.context, germ.truncation
    return germ + GermMap(Jet2(context, degree, extra[0]), Jet2(context, degree, extra[1]))


def enumerate_cells(max_lcm: int) -> Iterator[Tuple[LinearSpec, str]]:
    """Every linear part whose eigenvalue orders have lcm L in 2..max_lcm"""
    for level in range(2, max_lcm + 1):
        def order(k: int) -> int:
            return level // math.gcd(level, k)

        for k1 in range(level):
            for k2 in range(level):
                if math.lcm(order(k1), order(k2)) != level:
                    continue
                yield LinearSpec(level, k1, k2), "diagonal"
                if k1 == k2:
                    yield LinearSpec(level, k1, k2, diagonalizable=False), "jordan"
        for k1 in range(level):
            if order(k1) == level:
                yield LinearSpec(level, k1, free_eigenvalue=Fraction(2)), "free"


def canonical_representative(spec: LinearSpec) -> LinearSpec:
    """Least spec in the orbit under Galois automorphisms and (for two roots) the coordinate swap"""
    level = spec.level
    candidates = []
    for u in range(1, level + 1):
        if math.gcd(u, level) != 1:
            continue
        k1, k2 = spec.k1 * u % level, spec.k2 * u % level
        candidates.append((k1, k2))
        if spec.free_eigenvalue is None:
            candidates.append((k2, k1))
    k1, k2 = min(candidates)
    return replace(spec, k1=k1, k2=k2)


def _cell_periods(spec: LinearSpec) -> List[int]:
    m1, m2 = spec.orders
    top = m1 if m2 is None else math.lcm(m1, m2)
    return [int(m) for m in divisors(top) if m > 1]


def _cell_rng(seed: int, cell_id: str, M: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{cell_id}:{M}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _measure(germ: GermMap, M: int, quantity: str) -> int:
    indexer = FixedPointIndexer(germ, period=M)
    if quantity == "O_M":
        return orbit_count(germ, M, indexer)
    return dold_index(germ, M, indexer)


def _check(name: str, germ: GermMap, M: int, quantity: str, expected: str) -> ScanCheck:
    try:
        value = _measure(germ, M, quantity)
    except EngineError as e:
        return ScanCheck(
            germ=name, quantity=quantity, expected=expected, passed=False,
            germ_document=germ_to_document(germ), error=str(e),
        )
    passed = {">=2": value >= 2, "==1": value == 1, "==0": value == 0}[expected]
    return ScanCheck(
        germ=name, quantity=quantity, value=value, expected=expected, passed=passed,
        germ_document=None if passed else germ_to_document(germ),
    )


def _sample_check(name: str, base: GermMap, spec: LinearSpec, M: int, quantity: str, expected: str, rng: random.Random) -> ScanCheck:
    for _ in range(config.SAMPLE_MAX_DRAWS):
        germ = random_resonant_perturbation(base, spec, M, rng)
        try:
            FixedPointIndexer(germ, period=M).index(M)
        except NonIsolatedFixedPointError:
            debug_print(f"rejected non-isolated draw for {spec.label} at M={M}")
            continue
        return _check(name, germ, M, quantity, expected)
    return ScanCheck(
        germ=name, quantity=quantity, expected=expected, passed=False,
        error=f"no isolated draw in {config.SAMPLE_MAX_DRAWS} attempts",
    )


def _scan_task(task: Tuple[LinearSpec, str, int, int, int]) -> Tuple[VerdictB, List[ScanCheck]]:
    spec, kind, M, samples, seed = task
    verdict = classify_linear(spec, M)
    rng = _cell_rng(seed, spec.label, M)
    if verdict.outcome == "guaranteed":
        base, quantity, expected = positive_witness(verdict.case, spec, M), "O_M", ">=2"
    elif verdict.outcome == "not_guaranteed":
        return verdict, [_check("witness", witness_germ(verdict.case, spec, M), M, "O_M", "==1")]
    else:
        base, quantity, expected = base_germ(spec, M), "P_M", "==0"
    checks = [_check("witness" if quantity == "O_M" else "base", base, M, quantity, expected)]
    for index in range(samples):
        checks.append(_sample_check(f"sample-{index + 1}", base, spec, M, quantity, expected, rng))
    return verdict, checks


def verify_theorem(
    max_lcm: int,
    samples: int,
    seed: int,
    threads: int = 1,
    reduce: bool = True,
) -> ScanReport:
    """
    Classify every cell up to max_lcm and check the verdict against computed
    orbit counts on witnesses and random resonant perturbations

    Cells that are Galois conjugate or coordinate swaps share the result of
    their representative unless reduce is False.
    """
    if max_lcm < 2:
        raise ClassificationError(f"max_lcm must be at least 2, got {max_lcm}")
    cells = list(enumerate_cells(max_lcm))
    tasks: Dict[Tuple[str, int], Tuple[LinearSpec, str, int, int, int]] = {}
    plan = []
    for spec, kind in cells:
        representative = canonical_representative(spec) if reduce else spec
        for M in _cell_periods(spec):
            key = (representative.label, M)
            tasks.setdefault(key, (representative, kind, M, samples, seed))
            plan.append((spec, kind, M, key))

    keys = list(tasks)
    log_event("theorem_scan", cells=len(plan), computed=len(keys), threads=threads)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_scan_task, [tasks[key] for key in keys]))
    else:
        outcomes = [_scan_task(tasks[key]) for key in keys]
    results = dict(zip(keys, outcomes))

    report_cells = []
    for spec, kind, M, key in plan:
        rep_verdict, checks = results[key]
        verdict = classify_linear(spec, M)
        same = (verdict.outcome, verdict.case) == (rep_verdict.outcome, rep_verdict.case)
        report_cells.append(
            ScanCell(
                cell_id=spec.label,
                level=spec.level,
                k1=spec.k1,
                k2=None if spec.free_eigenvalue is not None else spec.k2,
                kind=kind,
                period=M,
                representative=key[0],
                verdict=verdict,
                checks=checks,
                passed=same and all(check.passed for check in checks),
            )
        )
    return ScanReport(max_lcm=max_lcm, samples=samples, seed=seed, reduced=reduce, cells=report_cells)
