"""
Machine-readable report models shared by the engine and the command line
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class DoldRow(BaseModel):
    """One divisor m of M: index of f^m, Dold index and orbit count"""

    period: int
    mu: int
    dold: int
    orbits: int
    admissible: bool
    method: str
    stabilized_at: Optional[int] = None


class DoldReport(BaseModel):
    period: int
    zeta_order: int
    truncation: int
    eigenvalue_orders: List[Optional[int]]
    admissible_periods: List[int]
    rows: List[DoldRow]
    mu_total: int
    admissible_sum: int
    consistent: bool

    def row(self, m: int) -> DoldRow:
        for row in self.rows:
            if row.period == m:
                return row
        raise KeyError(m)

    @property
    def dold_index(self) -> int:
        return self.row(self.period).dold

    @property
    def orbit_count(self) -> int:
        return self.row(self.period).orbits


class ConsistencyReport(BaseModel):
    period: int
    recomputed_mu: int
    recomputed_method: str
    admissible_sum: int
    off_admissible: Dict[int, int] = Field(default_factory=dict)
    consistent: bool
    table: DoldReport


class VerdictB(BaseModel):
    """Outcome of condition (B) for one linear part and period"""

    period: int
    outcome: Literal["guaranteed", "not_guaranteed", "no_period_M"]
    case: Optional[str] = None
    orders: List[Optional[int]]
    certificate: Dict[str, int] = Field(default_factory=dict)
    detail: str = ""

    def describe(self) -> str:
        if self.outcome == "no_period_M":
            return f"no_period_M: {self.detail}"
        if self.case and self.case.endswith("p"):
            label = f"({self.case[:-1]})'"
        else:
            label = f"({self.case})"
        return f"{self.outcome} {label}: {self.detail}"


class ScanCheck(BaseModel):
    germ: str
    quantity: str
    value: Optional[int] = None
    expected: str
    passed: bool
    germ_document: Optional[dict] = None
    error: Optional[str] = None


class ScanCell(BaseModel):
    cell_id: str
    level: int
    k1: int
    k2: Optional[int] = None
    kind: Literal["diagonal", "jordan", "free"]
    period: int
    representative: str
    verdict: VerdictB
    checks: List[ScanCheck] = Field(default_factory=list)
    passed: bool


class ScanReport(BaseModel):
    max_lcm: int
    samples: int
    seed: int
    reduced: bool
    cells: List[ScanCell]

    @property
    def passed(self) -> bool:
        return all(cell.passed for cell in self.cells)

    @property
    def failures(self) -> List[ScanCell]:
        return [cell for cell in self.cells if not cell.passed]


class NumericCount(BaseModel):
    period: int
    epsilons: List[float]
    counts: List[int]
    points: List[int]
    uncertified: List[int]
    max_residual: float
    embedding_error: float
    agree: bool
    count: Optional[int] = None
    exact: Optional[int] = None


class NormalFormSummary(BaseModel):
    degree: int
    eigenvalues: List[str]
    support: List[List[int]]
    transform_terms: int
