"""
Dold indices P_M(f,0), hidden orbit counts O_M(f,0) and admissible periods
"""
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from sympy import divisors, primefactors

from engine.errors import DivisibilityError, IndexConsistencyError
from engine.exactnum import CycloNum, root_order
from engine.jet import GermMap, Matrix2
from engine.multiplicity import FixedPointIndexer
from engine.reports import ConsistencyReport, DoldReport, DoldRow
from utils import log_event, render_dold_table


def prime_subsets(M: int) -> List[Tuple[int, int]]:
    """
    Terms (M:tau, (-1)^#tau) over all subsets tau of the primes dividing M

    Subsets are listed by size, then in increasing prime order.
    """
    if M < 1:
        raise ValueError(f"period must be positive, got {M}")
    primes = sorted(primefactors(M))
    terms = []
    for size in range(len(primes) + 1):
        for subset in combinations(primes, size):
            terms.append((M // math.prod(subset), (-1) ** size))
    return terms


@dataclass(frozen=True)
class PeriodSet:
    periods: Tuple[int, ...]

    def __contains__(self, m: int) -> bool:
        return m in self.periods

    def __iter__(self):
        return iter(self.periods)

    def __len__(self) -> int:
        return len(self.periods)


def periods_from_orders(m1: Optional[int], m2: Optional[int]) -> PeriodSet:
    """{1} with m1, m2 (when > 1) and lcm(m1, m2) when both are > 1"""
    periods = {1}
    for m in (m1, m2):
        if m is not None and m > 1:
            periods.add(m)
    if m1 is not None and m2 is not None and m1 > 1 and m2 > 1:
        periods.add(math.lcm(m1, m2))
    return PeriodSet(tuple(sorted(periods)))


def _charpoly_root(A: Matrix2) -> Optional[CycloNum]:
    """A root of unity of the field that is an eigenvalue of A, if any"""
    trace, det = A.trace(), A.det()
    for u in A.context.roots_of_unity():
        if (u * u - trace * u + det).is_zero():
            return u
    return None


def _conjugate_pair_order(A: Matrix2) -> Optional[int]:
    """
    Least m with X^m = 1 modulo the characteristic polynomial, for eigenvalues
    outside the field; both eigenvalues then have order m
    """
    trace, det = A.trace(), A.det()
    one, zero = A.context.one(), A.context.zero()
    a, b = zero, one  # X = a + b X
    bound = 8 * A.context.level ** 2
    for m in range(1, bound + 1):
        if a == one and b.is_zero():
            return m
        a, b = -b * det, a + b * trace
    return None


def eigenvalue_orders(A: Matrix2) -> Tuple[Optional[int], Optional[int]]:
    """Multiplicative orders of the eigenvalues of A (None for non-roots of unity)"""
    if A.is_triangular():
        return root_order(A.a11), root_order(A.a22)
    root = _charpoly_root(A)
    if root is not None:
        return root_order(root), root_order(A.trace() - root)
    order = _conjugate_pair_order(A)
    return order, order


def admissible_periods(A: Matrix2) -> PeriodSet:
    """Periods of periodic points of the linear map A"""
    return periods_from_orders(*eigenvalue_orders(A))


def _dold_sum(indexer: FixedPointIndexer, M: int) -> int:
    return sum(sign * indexer.index(m).order for m, sign in prime_subsets(M))


def dold_index(f: GermMap, M: int, indexer: Optional[FixedPointIndexer] = None) -> int:
    """
    P_M(f,0) as the alternating sum of mu_{f^(M:tau)}(0)

    Raises:
        IndexConsistencyError: P_M != 0 although M is not an admissible period
    """
    indexer = indexer or FixedPointIndexer(f, period=M)
    value = _dold_sum(indexer, M)
    periods = admissible_periods(f.linear_part())
    if M not in periods and value != 0:
        raise IndexConsistencyError(
            f"P_{M} = {value} although {M} is not in the admissible period set {list(periods)}"
        )
    return value


def orbit_count(f: GermMap, M: int, indexer: Optional[FixedPointIndexer] = None) -> int:
    """
    O_M(f,0) = P_M(f,0) / M

    Raises:
        DivisibilityError: M does not divide P_M
    """
    value = dold_index(f, M, indexer)
    if value % M:
        raise DivisibilityError(f"P_{M} = {value} is not divisible by {M}")
    return value // M


def dold_report(f: GermMap, M: int, indexer: Optional[FixedPointIndexer] = None) -> DoldReport:
    """Full divisor table of mu, P and O for every m | M"""
    indexer = indexer or FixedPointIndexer(f, period=M)
    orders = eigenvalue_orders(f.linear_part())
    periods = periods_from_orders(*orders)
    rows: List[DoldRow] = []
    for m in divisors(M):
        m = int(m)
        result = indexer.index(m)
        value = dold_index(f, m, indexer)
        if value % m:
            raise DivisibilityError(f"P_{m} = {value} is not divisible by {m}")
        rows.append(
            DoldRow(
                period=m,
                mu=result.order,
                dold=value,
                orbits=value // m,
                admissible=m in periods,
                method=result.method,
                stabilized_at=result.stabilized_at,
            )
        )
    mu_total = indexer.index(M).order
    admissible_sum = sum(row.dold for row in rows if row.admissible)
    report = DoldReport(
        period=M,
        zeta_order=f.context.level,
        truncation=indexer.degree,
        eigenvalue_orders=list(orders),
        admissible_periods=list(periods),
        rows=rows,
        mu_total=mu_total,
        admissible_sum=admissible_sum,
        consistent=mu_total == admissible_sum,
    )
    log_event("dold_report", period=M, mu_total=mu_total, dold=report.dold_index)
    return report


def index_consistency(f: GermMap, M: int, indexer: Optional[FixedPointIndexer] = None) -> ConsistencyReport:
    """
    Recompute mu_{f^M}(0) independently (dual-space oracle, fresh iterates)
    and compare with the sum of admissible P_m; P_m must vanish off the
    admissible set

    Raises:
        IndexConsistencyError: any disagreement, with the full table
    """
    indexer = indexer or FixedPointIndexer(f, period=M)
    try:
        table = dold_report(f, M, indexer)
    except IndexConsistencyError as e:
        raise IndexConsistencyError(f"consistency check for M={M} failed", str(e)) from e
    independent = FixedPointIndexer(f, period=M, method="dual_space").index(M)
    off_admissible: Dict[int, int] = {row.period: row.dold for row in table.rows if not row.admissible}
    consistent = (
        independent.order == table.admissible_sum
        and table.consistent
        and all(value == 0 for value in off_admissible.values())
    )
    report = ConsistencyReport(
        period=M,
        recomputed_mu=independent.order,
        recomputed_method=independent.method,
        admissible_sum=table.admissible_sum,
        off_admissible=off_admissible,
        consistent=consistent,
        table=table,
    )
    if not consistent:
        raise IndexConsistencyError(
            f"mu(f^{M}) = {independent.order} but admissible P_m sum to {table.admissible_sum}",
            render_dold_table(table),
        )
    return report
