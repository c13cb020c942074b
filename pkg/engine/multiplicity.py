"""
Local zero orders and fixed-point indices

zero_order tries Cronin's product formula on the lowest homogeneous forms
first and falls back to the dual-space (Macaulay) dimension count.
FixedPointIndexer adds the truncation escalation policy and memoizes
mu_{f^m}(0) per m.
"""
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from config import config
from engine.errors import (
    DeterminacyError,
    MultiplicityConsistencyError,
    NonIsolatedFixedPointError,
    NonStabilizedError,
    ZeroComponentError,
)
from engine.jet import GermMap, Jet2, compose
from engine.linalg import EchelonBasis, resultant
from utils import debug_print, log_escalation, log_event


@dataclass(frozen=True)
class HomogForms:
    """Lowest-degree homogeneous parts of the two components"""

    form1: Jet2
    form2: Jet2

    @property
    def degrees(self) -> Tuple[int, int]:
        return (self.form1.order(), self.form2.order())


@dataclass(frozen=True)
class MultiplicityResult:
    order: int
    method: str
    stabilized_at: Optional[int] = None
    trusted: bool = True
    truncation: Optional[int] = None


def lowest_forms(g: GermMap) -> HomogForms:
    """
    Exact lowest forms of both components

    Raises:
        ZeroComponentError: a component vanishes through degree D
    """
    forms = []
    for index, component in enumerate(g.components, start=1):
        order = component.order()
        if order is None:
            raise ZeroComponentError(
                f"component {index} vanishes through degree {g.truncation} "
                "(non-isolated zero or truncation too low)"
            )
        forms.append(component.homogeneous_part(order))
    return HomogForms(*forms)


def _dehomogenize(form: Jet2, degree: int) -> list:
    """Descending coefficients of form(t, 1), leading zeros stripped"""
    coeffs = [form.coefficient(i, degree - i) for i in range(degree, -1, -1)]
    while coeffs and coeffs[0].is_zero():
        coeffs.pop(0)
    return coeffs


def forms_coprime(h: HomogForms) -> bool:
    """True iff the two forms share only the trivial zero"""
    m1, m2 = h.degrees
    if h.form1.coefficient(m1, 0).is_zero() and h.form2.coefficient(m2, 0).is_zero():
        return False
    p = _dehomogenize(h.form1, m1)
    q = _dehomogenize(h.form2, m2)
    return not resultant(p, q, h.form1.context).is_zero()


def cronin_zero_order(g: GermMap) -> Optional[MultiplicityResult]:
    """m1 * m2 when the lowest forms are coprime, otherwise None"""
    forms = lowest_forms(g)
    if not forms_coprime(forms):
        return None
    m1, m2 = forms.degrees
    return MultiplicityResult(order=m1 * m2, method="cronin", truncation=g.truncation)


def _monomial_count(t: int) -> int:
    return (t + 1) * (t + 2) // 2


def _dual_space_dimensions(g: GermMap, horizon: int) -> Tuple[List[int], Optional[int]]:
    """
    Dimensions of R / (I + m^(t+1)) for t = 0, 1, ... up to the horizon

    Rows x^alpha * g_i enter at the stage equal to their lowest degree;
    columns are monomials keyed by (degree, power of x2).
    """
    basis = EchelonBasis()
    orders = [component.order() for component in g.components]
    dimensions: List[int] = []
    for t in range(horizon + 1):
        for component, order in zip(g.components, orders):
            if order is None or order > t:
                continue
            shift = t - order
            for a2 in range(shift + 1):
                row = {
                    (i1 + i2 + shift, i2 + a2): c
                    for (i1, i2), c in component.terms.items()
                    if i1 + i2 + shift <= horizon
                }
                basis.add_vector(row)
        rank = sum(1 for degree, _ in basis.pivots if degree <= t)
        dimensions.append(_monomial_count(t) - rank)
        if t >= 1 and dimensions[t] == dimensions[t - 1]:
            return dimensions, t - 1
    return dimensions, None


def dual_space_zero_order(g: GermMap, cap: Optional[int] = None) -> MultiplicityResult:
    """
    Multiplicity as the stable dimension of the local dual space

    Args:
        g: germ with g(0) = 0
        cap: largest degree of differential functionals to try (defaults to D)

    Returns:
        MultiplicityResult with stabilized_at = t* and trusted = (t* + 1 <= D)

    Raises:
        NonStabilizedError: dimensions still increasing at the cap
    """
    truncation = g.truncation
    cap = truncation if cap is None else cap
    orders = [o for o in (c.order() for c in g.components) if o is not None]
    if not orders:
        raise NonStabilizedError("both components vanish; the zero is not isolated", cap, 0)
    horizon = min(cap, max(4, sum(orders) + 2))
    while True:
        dimensions, stabilized_at = _dual_space_dimensions(g, horizon)
        if stabilized_at is not None:
            return MultiplicityResult(
                order=dimensions[stabilized_at],
                method="dual_space",
                stabilized_at=stabilized_at,
                trusted=stabilized_at + 1 <= truncation,
                truncation=truncation,
            )
        if horizon >= cap:
            raise NonStabilizedError(
                f"dual-space dimension still increasing at degree {cap} "
                "(possibly non-isolated zero or truncation too low)",
                cap,
                dimensions[-1],
            )
        horizon = min(cap, 2 * horizon)


def zero_order(g: GermMap) -> MultiplicityResult:
    """
    Zero order pi_g(0)

    Raises:
        MultiplicityConsistencyError: the oracle did not exceed m1 * m2 after Cronin declined
    """
    forms = lowest_forms(g)
    if forms_coprime(forms):
        m1, m2 = forms.degrees
        return MultiplicityResult(order=m1 * m2, method="cronin", truncation=g.truncation)
    result = dual_space_zero_order(g)
    bound = forms.degrees[0] * forms.degrees[1]
    if result.order <= bound:
        raise MultiplicityConsistencyError(
            f"dual-space order {result.order} does not exceed m1*m2 = {bound} for non-coprime forms"
        )
    return result


class FixedPointIndexer:
    """
    Indices mu_{f^m}(0) of one germ, memoized per m

    Work starts at D = max(TRUNCATION_FLOOR, 2M + 3) and doubles (up to
    TRUNCATION_CAP) when a result is not determined by the jet; each retry
    recomputes the iterate from the original polynomial germ.
    """

    def __init__(self, germ: GermMap, period: Optional[int] = None, method: str = "auto"):
        if method not in ("auto", "dual_space"):
            raise ValueError(f"unknown multiplicity method {method!r}")
        self.germ = germ
        self.method = method
        self.degree = self._initial_degree(period or 1)
        self._iterates: Dict[int, List[GermMap]] = {}
        self._memo: Dict[int, MultiplicityResult] = {}
        self._lock = threading.RLock()

    @staticmethod
    def _initial_degree(period: int) -> int:
        return min(max(config.TRUNCATION_FLOOR, 2 * period + 3), config.TRUNCATION_CAP)

    def iterate_at(self, m: int, degree: int) -> GermMap:
        """f^m truncated at the given degree (chains are cached per degree)"""
        with self._lock:
            chain = self._iterates.get(degree)
            if chain is None:
                chain = [self.germ.with_truncation(degree)]
                self._iterates[degree] = chain
            while len(chain) < m:
                chain.append(compose(chain[0], chain[-1]))
            return chain[m - 1]

    def _compute(self, g: GermMap) -> MultiplicityResult:
        if self.method == "dual_space":
            return dual_space_zero_order(g)
        return zero_order(g)

    def index(self, m: int) -> MultiplicityResult:
        """
        mu_{f^m}(0)

        Raises:
            NonIsolatedFixedPointError: no certified value within the escalation budget
        """
        if m < 1:
            raise ValueError(f"iteration count must be positive, got {m}")
        with self._lock:
            cached = self._memo.get(m)
            if cached is not None:
                return cached
            degree = max(self.degree, self._initial_degree(m))
            escalations = 0
            while True:
                try:
                    result = self._compute(self.iterate_at(m, degree).displacement())
                    if result.trusted:
                        self._memo[m] = result
                        debug_print(f"mu(f^{m}) = {result.order} via {result.method} at D={degree}")
                        log_event("index", period=m, order=result.order, method=result.method, degree=degree)
                        return result
                    reason = f"dimension stabilized at t*={result.stabilized_at}, needs D >= {result.stabilized_at + 1}"
                except DeterminacyError as e:
                    reason = str(e)
                if escalations >= config.MAX_ESCALATIONS or degree >= config.TRUNCATION_CAP:
                    raise NonIsolatedFixedPointError(m, degree, reason)
                new_degree = min(2 * degree, config.TRUNCATION_CAP)
                log_escalation(m, degree, new_degree, reason)
                self.degree = degree = new_degree
                escalations += 1


def fixed_point_index(f: GermMap, m: int) -> MultiplicityResult:
    """mu_{f^m}(0) = pi_{id - f^m}(0)"""
    return FixedPointIndexer(f).index(m)
