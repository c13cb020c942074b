"""
Truncated bivariate polynomial algebra over Q(zeta_L)

Jet2 is a sparse polynomial in (x1, x2) known exactly through degree D.
GermMap pairs two jets with no constant term: a germ of the plane fixing
the origin. Composition, iteration, inversion and conjugation all keep
every coefficient of degree <= D exact.
"""
import json
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from engine.errors import (
    ContextMismatchError,
    EngineError,
    GermFormatError,
    SingularLinearPartError,
    TruncationError,
)
from engine.exactnum import (
    CycloContext,
    CycloNum,
    Scalar,
    as_cyclo,
    format_coeff,
    get_context,
    parse_coeff,
)

Exponent = Tuple[int, int]


def _degree_key(exponent: Exponent) -> Tuple[int, int]:
    return (exponent[0] + exponent[1], exponent[1])


class Jet2:
    """Sparse bivariate polynomial truncated at degree D (no zero coefficients stored)"""

    __slots__ = ("context", "truncation", "terms")

    def __init__(
        self,
        context: CycloContext,
        truncation: int,
        terms: Optional[Mapping[Exponent, Union[CycloNum, Scalar]]] = None,
    ):
        if isinstance(truncation, bool) or not isinstance(truncation, int) or truncation < 1:
            raise TruncationError(f"truncation degree must be a positive integer, got {truncation!r}")
        cleaned: Dict[Exponent, CycloNum] = {}
        for exponent, value in (terms or {}).items():
            i1, i2 = exponent
            if i1 < 0 or i2 < 0:
                raise ValueError(f"negative exponent {exponent}")
            if i1 + i2 > truncation:
                continue
            value = as_cyclo(value, context)
            if not value.is_zero():
                cleaned[(int(i1), int(i2))] = value
        self.context = context
        self.truncation = truncation
        self.terms = cleaned

    @classmethod
    def _raw(cls, context: CycloContext, truncation: int, terms: Dict[Exponent, CycloNum]) -> "Jet2":
        jet = cls.__new__(cls)
        jet.context = context
        jet.truncation = truncation
        jet.terms = terms
        return jet

    @classmethod
    def zero(cls, context: CycloContext, truncation: int) -> "Jet2":
        return cls(context, truncation)

    @classmethod
    def monomial(cls, context: CycloContext, truncation: int, i1: int, i2: int, coeff=1) -> "Jet2":
        return cls(context, truncation, {(i1, i2): coeff})

    # --- inspection -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> Optional[int]:
        """Lowest degree carrying a nonzero coefficient, None for the zero jet"""
        if not self.terms:
            return None
        return min(i1 + i2 for i1, i2 in self.terms)

    def degree(self) -> Optional[int]:
        if not self.terms:
            return None
        return max(i1 + i2 for i1, i2 in self.terms)

    def coefficient(self, i1: int, i2: int) -> CycloNum:
        value = self.terms.get((i1, i2))
        return self.context.zero() if value is None else value

    def homogeneous_part(self, degree: int) -> "Jet2":
        return Jet2._raw(
            self.context,
            self.truncation,
            {e: c for e, c in self.terms.items() if e[0] + e[1] == degree},
        )

    def items(self) -> List[Tuple[Exponent, CycloNum]]:
        """Terms sorted by degree, then by the power of x2"""
        return sorted(self.terms.items(), key=lambda item: _degree_key(item[0]))

    def with_truncation(self, truncation: int) -> "Jet2":
        """Same polynomial viewed at another truncation degree"""
        return Jet2(self.context, truncation, self.terms)

    def _check_space(self, other: "Jet2"):
        if other.context.level != self.context.level:
            raise ContextMismatchError(
                f"jets over Q(zeta_{self.context.level}) and Q(zeta_{other.context.level})"
            )
        if other.truncation != self.truncation:
            raise ContextMismatchError(
                f"jets truncated at {self.truncation} and {other.truncation}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Jet2):
            return NotImplemented
        return (
            self.context.level == other.context.level
            and self.truncation == other.truncation
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.context.level, self.truncation, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Jet2(L={self.context.level}, D={self.truncation}, {format_jet(self)})"

    # --- arithmetic -----------------------------------------------------
    def __neg__(self) -> "Jet2":
        return Jet2._raw(self.context, self.truncation, {e: -c for e, c in self.terms.items()})

    def __add__(self, other: "Jet2") -> "Jet2":
        if not isinstance(other, Jet2):
            return NotImplemented
        self._check_space(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            current = out.get(e)
            value = c if current is None else current + c
            if value.is_zero():
                out.pop(e, None)
            else:
                out[e] = value
        return Jet2._raw(self.context, self.truncation, out)

    def __sub__(self, other: "Jet2") -> "Jet2":
        if not isinstance(other, Jet2):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Union[CycloNum, Scalar]) -> "Jet2":
        factor = as_cyclo(factor, self.context)
        if factor.is_zero():
            return Jet2.zero(self.context, self.truncation)
        return Jet2._raw(self.context, self.truncation, {e: c * factor for e, c in self.terms.items()})

    def __mul__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            return self.scale(other)
        self._check_space(other)
        bound = self.truncation
        right = sorted(other.terms.items(), key=lambda item: item[0][0] + item[0][1])
        out: Dict[Exponent, CycloNum] = {}
        for (a1, a2), x in self.terms.items():
            room = bound - a1 - a2
            for (b1, b2), y in right:
                if b1 + b2 > room:
                    break
                key = (a1 + b1, a2 + b2)
                product = x * y
                current = out.get(key)
                out[key] = product if current is None else current + product
        return Jet2._raw(self.context, bound, {e: c for e, c in out.items() if not c.is_zero()})

    def __rmul__(self, other) -> "Jet2":
        return self.scale(other)

    def substitute_powers(self, a: int, b: int, degree: Optional[int] = None) -> "Jet2":
        """Precompose with (y1^a, y2^b)"""
        out_degree = _substitution_degree(self.truncation, a, b, degree)
        return Jet2(
            self.context,
            out_degree,
            {(a * i1, b * i2): c for (i1, i2), c in self.terms.items()},
        )


def _substitution_degree(truncation: int, a: int, b: int, degree: Optional[int]) -> int:
    if a < 1 or b < 1:
        raise ValueError(f"substitution powers must be positive, got ({a}, {b})")
    exact_through = min(a, b) * (truncation + 1) - 1
    if degree is None:
        return exact_through
    if degree > exact_through:
        raise TruncationError(
            f"substituting (y1^{a}, y2^{b}) into a degree-{truncation} jet is exact only "
            f"through degree {exact_through}, requested {degree}"
        )
    return degree


@dataclass(frozen=True)
class Matrix2:
    """2x2 matrix over Q(zeta_L)"""

    a11: CycloNum
    a12: CycloNum
    a21: CycloNum
    a22: CycloNum

    @classmethod
    def diagonal(cls, l1: CycloNum, l2: CycloNum) -> "Matrix2":
        zero = l1.context.zero()
        return cls(l1, zero, zero, l2)

    @classmethod
    def identity(cls, context: CycloContext) -> "Matrix2":
        return cls.diagonal(context.one(), context.one())

    @property
    def context(self) -> CycloContext:
        return self.a11.context

    def entries(self) -> Tuple[CycloNum, CycloNum, CycloNum, CycloNum]:
        return (self.a11, self.a12, self.a21, self.a22)

    def det(self) -> CycloNum:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> CycloNum:
        return self.a11 + self.a22

    def is_diagonal(self) -> bool:
        return self.a12.is_zero() and self.a21.is_zero()

    def is_triangular(self) -> bool:
        return self.a12.is_zero() or self.a21.is_zero()

    def inverse(self) -> "Matrix2":
        det = self.det()
        if det.is_zero():
            raise SingularLinearPartError("linear part has zero determinant")
        inv = det.inverse()
        return Matrix2(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv)

    def __matmul__(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def __str__(self) -> str:
        return "[[{}, {}], [{}, {}]]".format(*(format_coeff(e) for e in self.entries()))


class GermMap:
    """Polynomial germ (f1, f2) of the plane with f(0) = 0"""

    __slots__ = ("components",)

    def __init__(self, first: Jet2, second: Jet2):
        first._check_space(second)
        for index, component in enumerate((first, second), start=1):
            if (0, 0) in component.terms:
                raise EngineError(f"component {index} has a constant term; a germ must fix the origin")
        self.components: Tuple[Jet2, Jet2] = (first, second)

    @classmethod
    def from_terms(
        cls,
        context: CycloContext,
        truncation: int,
        first: Mapping[Exponent, Union[CycloNum, Scalar]],
        second: Mapping[Exponent, Union[CycloNum, Scalar]],
    ) -> "GermMap":
        return cls(Jet2(context, truncation, first), Jet2(context, truncation, second))

    @classmethod
    def identity(cls, context: CycloContext, truncation: int) -> "GermMap":
        return cls.from_terms(context, truncation, {(1, 0): 1}, {(0, 1): 1})

    @classmethod
    def linear(cls, matrix: Matrix2, truncation: int) -> "GermMap":
        return cls.from_terms(
            matrix.context,
            truncation,
            {(1, 0): matrix.a11, (0, 1): matrix.a12},
            {(1, 0): matrix.a21, (0, 1): matrix.a22},
        )

    @property
    def context(self) -> CycloContext:
        return self.components[0].context

    @property
    def truncation(self) -> int:
        return self.components[0].truncation

    def linear_part(self) -> Matrix2:
        f1, f2 = self.components
        return Matrix2(f1.coefficient(1, 0), f1.coefficient(0, 1), f2.coefficient(1, 0), f2.coefficient(0, 1))

    def with_truncation(self, truncation: int) -> "GermMap":
        return GermMap(*(c.with_truncation(truncation) for c in self.components))

    def displacement(self) -> "GermMap":
        """id - f"""
        identity = GermMap.identity(self.context, self.truncation)
        return identity - self

    def swapped(self) -> "GermMap":
        """Conjugate by the coordinate swap (x1, x2) -> (x2, x1)"""
        def flip(jet: Jet2) -> Jet2:
            return Jet2._raw(jet.context, jet.truncation, {(i2, i1): c for (i1, i2), c in jet.terms.items()})

        f1, f2 = self.components
        return GermMap(flip(f2), flip(f1))

    def __add__(self, other: "GermMap") -> "GermMap":
        return GermMap(self.components[0] + other.components[0], self.components[1] + other.components[1])

    def __sub__(self, other: "GermMap") -> "GermMap":
        return GermMap(self.components[0] - other.components[0], self.components[1] - other.components[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GermMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __iter__(self) -> Iterator[Jet2]:
        return iter(self.components)

    def __repr__(self) -> str:
        return f"GermMap(L={self.context.level}, D={self.truncation}, {format_germ(self)})"


def _check_germs(outer: GermMap, inner: GermMap):
    outer.components[0]._check_space(inner.components[0])


class _PowerTable:
    """Cached products u^i * v^j of the inner map's components"""

    def __init__(self, inner: GermMap):
        self.u, self.v = inner.components
        one = Jet2._raw(inner.context, inner.truncation, {(0, 0): inner.context.one()})
        self._u_powers = [one]
        self._v_powers = [one]
        self._products: Dict[Exponent, Jet2] = {}

    def _power(self, powers: List[Jet2], base: Jet2, n: int) -> Jet2:
        while len(powers) <= n:
            powers.append(powers[-1] * base)
        return powers[n]

    def monomial(self, i1: int, i2: int) -> Jet2:
        key = (i1, i2)
        cached = self._products.get(key)
        if cached is None:
            left = self._power(self._u_powers, self.u, i1)
            right = self._power(self._v_powers, self.v, i2)
            cached = left if i2 == 0 else right if i1 == 0 else left * right
            self._products[key] = cached
        return cached

    def evaluate(self, jet: Jet2) -> Jet2:
        out: Dict[Exponent, CycloNum] = {}
        bound = self.u.truncation
        for (i1, i2), c in jet.terms.items():
            if i1 + i2 > bound:
                continue
            for e, value in self.monomial(i1, i2).terms.items():
                term = c * value
                current = out.get(e)
                out[e] = term if current is None else current + term
        return Jet2._raw(jet.context, bound, {e: c for e, c in out.items() if not c.is_zero()})


def compose(outer: GermMap, inner: GermMap) -> GermMap:
    """outer o inner, exact through degree D"""
    _check_germs(outer, inner)
    table = _PowerTable(inner)
    return GermMap(*(table.evaluate(component) for component in outer.components))


def iterates(f: GermMap, m: int) -> List[GermMap]:
    """[f, f^2, ..., f^m] with f^k = f o f^(k-1)"""
    if m < 1:
        raise ValueError(f"iteration count must be positive, got {m}")
    chain = [f]
    while len(chain) < m:
        chain.append(compose(f, chain[-1]))
    return chain


def iterate(f: GermMap, m: int) -> GermMap:
    """f^m"""
    return iterates(f, m)[-1]


def _apply_matrix(matrix: Matrix2, first: Jet2, second: Jet2) -> Tuple[Jet2, Jet2]:
    return (
        first.scale(matrix.a11) + second.scale(matrix.a12),
        first.scale(matrix.a21) + second.scale(matrix.a22),
    )


def invert(H: GermMap) -> GermMap:
    """
    Compositional inverse computed degree by degree

    Raises:
        SingularLinearPartError: DH(0) is not invertible
    """
    linear_inverse = H.linear_part().inverse()
    truncation = H.truncation
    G = GermMap.linear(linear_inverse, truncation)
    for degree in range(2, truncation + 1):
        residual = compose(H.with_truncation(degree), G.with_truncation(degree))
        e1, e2 = (component.homogeneous_part(degree) for component in residual.components)
        if e1.is_zero() and e2.is_zero():
            continue
        c1, c2 = _apply_matrix(linear_inverse, e1, e2)
        G = GermMap(
            G.components[0] - c1.with_truncation(truncation),
            G.components[1] - c2.with_truncation(truncation),
        )
    return G


def conjugate(f: GermMap, H: GermMap) -> GermMap:
    """H^-1 o f o H"""
    return compose(invert(H), compose(f, H))


JetPair = Union[GermMap, Tuple[Jet2, Jet2], Jet2]


def substitute_powers(g: JetPair, a: int, b: int, degree: Optional[int] = None) -> JetPair:
    """
    Precompose with (y1^a, y2^b)

    The output is exact through min(a, b) * (D + 1) - 1; asking for more
    raises TruncationError.
    """
    if isinstance(g, Jet2):
        return g.substitute_powers(a, b, degree)
    if isinstance(g, GermMap):
        return GermMap(*(c.substitute_powers(a, b, degree) for c in g.components))
    first, second = g
    return (first.substitute_powers(a, b, degree), second.substitute_powers(a, b, degree))


# --- display ------------------------------------------------------------------

def _monomial_text(i1: int, i2: int) -> str:
    parts = []
    for name, power in (("x1", i1), ("x2", i2)):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return "*".join(parts) if parts else "1"


def format_jet(jet: Jet2) -> str:
    """Human-readable polynomial, lowest degree first"""
    if jet.is_zero():
        return "0"
    pieces = []
    for (i1, i2), c in jet.items():
        monomial = _monomial_text(i1, i2)
        if c == 1:
            pieces.append(monomial)
        elif c == -1:
            pieces.append(f"-{monomial}")
        elif i1 + i2 == 0:
            pieces.append(f"({format_coeff(c)})")
        else:
            pieces.append(f"({format_coeff(c)})*{monomial}")
    return " + ".join(pieces).replace("+ -", "- ")


def format_germ(f: GermMap) -> str:
    return "(" + ", ".join(format_jet(c) for c in f.components) + ")"


# --- germ documents -------------------------------------------------------------

def germ_to_document(f: GermMap) -> Dict[str, Any]:
    """Plain-data document with deterministic term order"""
    return {
        "zeta_order": f.context.level,
        "truncation": f.truncation,
        "components": [
            [{"e": [i1, i2], "c": format_coeff(c)} for (i1, i2), c in component.items()]
            for component in f.components
        ],
    }


def germ_from_document(document: Mapping[str, Any]) -> GermMap:
    """
    Rebuild a germ from its document

    Raises:
        GermFormatError: missing fields, malformed terms or a constant term
    """
    try:
        level = document["zeta_order"]
        truncation = document["truncation"]
        components = document["components"]
    except (KeyError, TypeError) as e:
        raise GermFormatError(f"germ document is missing field {e}") from e
    if not isinstance(level, int) or isinstance(level, bool) or level < 1:
        raise GermFormatError(f"zeta_order must be a positive integer, got {level!r}")
    if not isinstance(truncation, int) or isinstance(truncation, bool) or truncation < 1:
        raise GermFormatError(f"truncation must be a positive integer, got {truncation!r}")
    if not isinstance(components, Sequence) or len(components) != 2:
        raise GermFormatError("components must be a list of two term lists")

    context = get_context(level)
    jets = []
    for index, terms in enumerate(components, start=1):
        if not isinstance(terms, Sequence):
            raise GermFormatError(f"component {index} must be a list of terms")
        parsed: Dict[Exponent, CycloNum] = {}
        for term in terms:
            try:
                exponent = term["e"]
                text = term["c"]
            except (KeyError, TypeError) as e:
                raise GermFormatError(f"component {index}: malformed term {term!r}") from e
            if (
                not isinstance(exponent, Sequence)
                or len(exponent) != 2
                or not all(isinstance(i, int) and not isinstance(i, bool) and i >= 0 for i in exponent)
            ):
                raise GermFormatError(f"component {index}: bad exponent {exponent!r}")
            key = (exponent[0], exponent[1])
            if key == (0, 0):
                raise GermFormatError(f"component {index}: constant term; a germ must fix the origin")
            if sum(key) > truncation:
                raise GermFormatError(f"component {index}: term {key} exceeds truncation {truncation}")
            if key in parsed:
                raise GermFormatError(f"component {index}: duplicate term {key}")
            parsed[key] = parse_coeff(text, context)
        jets.append(Jet2(context, truncation, parsed))
    return GermMap(*jets)


def dumps_germ(f: GermMap) -> str:
    return json.dumps(germ_to_document(f), sort_keys=True, indent=2) + "\n"


def loads_germ(text: str) -> GermMap:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise GermFormatError(f"germ file is not valid JSON: {e}") from e
    return germ_from_document(document)
