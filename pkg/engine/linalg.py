"""
Exact linear algebra over Q(zeta_L): Bareiss determinants, Sylvester
resultants and an incremental sparse echelon basis
"""
from typing import Dict, Hashable, List, Sequence

from engine.exactnum import CycloContext, CycloNum


def bareiss_determinant(matrix: Sequence[Sequence[CycloNum]], context: CycloContext) -> CycloNum:
    """
    Determinant by Bareiss' fraction-free elimination

    Args:
        matrix: square matrix of field elements
        context: field the entries live in

    Returns:
        det(matrix)
    """
    n = len(matrix)
    if n == 0:
        return context.one()
    rows = [list(row) for row in matrix]
    if any(len(row) != n for row in rows):
        raise ValueError("bareiss_determinant needs a square matrix")
    if n == 1:
        return rows[0][0]

    sign = 1
    previous = context.one()
    for k in range(n - 1):
        if rows[k][k].is_zero():
            for i in range(k + 1, n):
                if not rows[i][k].is_zero():
                    rows[i], rows[k] = rows[k], rows[i]
                    sign = -sign
                    break
            else:
                return context.zero()
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                element = pivot * rows[i][j] - rows[i][k] * rows[k][j]
                rows[i][j] = element / previous if k else element
            rows[i][k] = context.zero()
        previous = pivot
    det = rows[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(p: Sequence[CycloNum], q: Sequence[CycloNum], context: CycloContext) -> List[List[CycloNum]]:
    """Sylvester matrix of two univariate polynomials given by descending coefficients"""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    zero = context.zero()
    matrix = []
    for i in range(n):
        matrix.append([zero] * i + list(p) + [zero] * (size - m - 1 - i))
    for i in range(m):
        matrix.append([zero] * i + list(q) + [zero] * (size - n - 1 - i))
    return matrix


def resultant(p: Sequence[CycloNum], q: Sequence[CycloNum], context: CycloContext) -> CycloNum:
    """
    Resultant of two univariate polynomials

    Both coefficient lists are descending with a nonzero leading coefficient.
    """
    if not p or not q or p[0].is_zero() or q[0].is_zero():
        raise ValueError("resultant needs nonzero leading coefficients")
    m, n = len(p) - 1, len(q) - 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    return bareiss_determinant(sylvester_matrix(p, q, context), context)


SparseRow = Dict[Hashable, CycloNum]


class EchelonBasis:
    """
    Row-echelon basis grown one sparse vector at a time

    Columns are any totally ordered keys; a stored row's pivot is its least
    key and pivots are normalized to one.
    """

    def __init__(self):
        self.pivots: Dict[Hashable, SparseRow] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def add_vector(self, vec0: SparseRow) -> bool:
        """Insert a vector; returns False when it was already in the span"""
        vec = {key: value for key, value in vec0.items() if not value.is_zero()}
        while vec:
            lead = min(vec)
            row = self.pivots.get(lead)
            if row is None:
                scale = vec[lead].inverse()
                self.pivots[lead] = {key: value * scale for key, value in vec.items()}
                return True
            factor = vec[lead]
            for key, value in row.items():
                updated = vec.get(key)
                updated = -(factor * value) if updated is None else updated - factor * value
                if updated.is_zero():
                    vec.pop(key, None)
                else:
                    vec[key] = updated
        return False
