"""
Poincare-Dulac normal forms for germs with diagonal linear part
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

from engine.errors import NonDiagonalLinearPartError, SingularLinearPartError, TruncationError
from engine.exactnum import CycloNum
from engine.jet import Exponent, GermMap, Jet2, compose, conjugate, iterate
from utils import debug_print


@dataclass(frozen=True)
class ResonanceRelation:
    """lambda_j == lambda1^i1 * lambda2^i2 for component j (1 or 2)"""

    j: int
    i1: int
    i2: int
    holds: bool

    def as_list(self) -> List[int]:
        return [self.j, self.i1, self.i2]


@dataclass(frozen=True)
class NormalFormResult:
    transform: GermMap
    normalized: GermMap
    degree: int


def is_resonant(j: int, i1: int, i2: int, l1: CycloNum, l2: CycloNum) -> bool:
    """Exact test of lambda_j == lambda1^i1 * lambda2^i2"""
    if j not in (1, 2):
        raise ValueError(f"component index must be 1 or 2, got {j}")
    target = l1 if j == 1 else l2
    return l1 ** i1 * l2 ** i2 == target


def _diagonal_eigenvalues(f: GermMap) -> Tuple[CycloNum, CycloNum]:
    A = f.linear_part()
    if not A.is_diagonal():
        raise NonDiagonalLinearPartError(f"linear part {A} is not diagonal")
    if A.a11.is_zero() or A.a22.is_zero():
        raise SingularLinearPartError(f"linear part {A} has a zero eigenvalue")
    return A.a11, A.a22


def _homological_step(
    g: GermMap, degree: int, l1: CycloNum, l2: CycloNum
) -> Tuple[Dict[Exponent, CycloNum], Dict[Exponent, CycloNum]]:
    """Transform coefficients a / (lambda^I - lambda_j) for the non-resonant terms of one degree"""
    shear: List[Dict[Exponent, CycloNum]] = [{}, {}]
    for j, (component, target) in enumerate(zip(g.components, (l1, l2))):
        for (i1, i2), a in component.homogeneous_part(degree).terms.items():
            denominator = l1 ** i1 * l2 ** i2 - target
            if denominator.is_zero():
                continue
            shear[j][(i1, i2)] = a / denominator
    return shear[0], shear[1]


def poincare_dulac(f: GermMap, r: int) -> NormalFormResult:
    """
    Remove every non-resonant coefficient of degree 2..r

    Args:
        f: germ with diagonal, invertible linear part
        r: target degree, at most D

    Returns:
        NormalFormResult with H tangent to the identity and g = H^-1 o f o H
    """
    if r > f.truncation:
        raise TruncationError(f"normal form degree {r} exceeds truncation {f.truncation}")
    l1, l2 = _diagonal_eigenvalues(f)
    context, truncation = f.context, f.truncation
    g = f
    H = GermMap.identity(context, truncation)
    for degree in range(2, r + 1):
        h1, h2 = _homological_step(g, degree, l1, l2)
        if not h1 and not h2:
            continue
        shear = GermMap(
            Jet2(context, truncation, {(1, 0): 1, **h1}),
            Jet2(context, truncation, {(0, 1): 1, **h2}),
        )
        g = conjugate(g, shear)
        H = compose(H, shear)
        debug_print(f"normal form: removed {len(h1) + len(h2)} terms of degree {degree}")
    return NormalFormResult(transform=H, normalized=g, degree=r)


def resonant_support(g: GermMap, r: int) -> List[ResonanceRelation]:
    """Every nonzero coefficient of degree 2..r with its resonance status"""
    l1, l2 = _diagonal_eigenvalues(g)
    relations = []
    for j, component in enumerate(g.components, start=1):
        for (i1, i2), _ in component.items():
            if 2 <= i1 + i2 <= r:
                relations.append(ResonanceRelation(j, i1, i2, is_resonant(j, i1, i2, l1, l2)))
    return relations


def check_iterate_resonance(g: GermMap, k: int, r: int) -> bool:
    """Every coefficient of g^k in degrees 2..r is resonant"""
    l1, l2 = _diagonal_eigenvalues(g)
    gk = iterate(g, k)
    for j, component in enumerate(gk.components, start=1):
        for (i1, i2) in component.terms:
            if 2 <= i1 + i2 <= r and not is_resonant(j, i1, i2, l1, l2):
                return False
    return True
