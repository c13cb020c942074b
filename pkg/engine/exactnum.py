"""
Exact arithmetic in cyclotomic fields Q(zeta_L)

Elements are stored in the power basis modulo the L-th cyclotomic polynomial
as integer numerators over one common positive denominator, so the zero test
is "all numerators vanish".
"""
import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import QQ, Poly

from config import config
from engine.errors import ContextMismatchError, CycloLevelError, GermFormatError

_X = sympy.Symbol("X")

Scalar = Union[int, Fraction]


def cyclotomic_poly(level: int) -> Tuple[int, ...]:
    """
    Integer coefficients of the L-th cyclotomic polynomial

    Args:
        level: L >= 1, at most config.MAX_CYCLO_LEVEL

    Returns:
        Ascending coefficient tuple of the monic polynomial Phi_L
    """
    if isinstance(level, bool) or not isinstance(level, int) or level < 1:
        raise CycloLevelError(f"cyclotomic level must be a positive integer, got {level!r}")
    if level > config.MAX_CYCLO_LEVEL:
        raise CycloLevelError(
            f"cyclotomic level {level} exceeds MAX_CYCLO_LEVEL={config.MAX_CYCLO_LEVEL}"
        )
    return _cyclotomic_coefficients(level)


@lru_cache(maxsize=None)
def _cyclotomic_coefficients(level: int) -> Tuple[int, ...]:
    poly = Poly(sympy.cyclotomic_poly(level, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


class CycloContext:
    """The field Q(zeta_L); shared read-only by every element of one computation"""

    __slots__ = ("level", "phi", "cyclo_poly", "_zeta_cache")

    def __init__(self, level: int):
        self.cyclo_poly = cyclotomic_poly(level)
        self.level = level
        self.phi = len(self.cyclo_poly) - 1
        self._zeta_cache: Dict[int, "CycloNum"] = {}

    def __repr__(self) -> str:
        return f"CycloContext(L={self.level})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CycloContext) and other.level == self.level

    def __hash__(self) -> int:
        return hash(("CycloContext", self.level))

    def __reduce__(self):
        return (get_context, (self.level,))

    def reduce(self, coeffs: List[int]) -> Tuple[int, ...]:
        """Reduce an integer coefficient list modulo Phi_L (Phi_L is monic)"""
        phi = self.phi
        poly = self.cyclo_poly
        for k in range(len(coeffs) - 1, phi - 1, -1):
            c = coeffs[k]
            if c:
                base = k - phi
                for i in range(phi):
                    if poly[i]:
                        coeffs[base + i] -= c * poly[i]
                coeffs[k] = 0
        if len(coeffs) < phi:
            coeffs = coeffs + [0] * (phi - len(coeffs))
        return tuple(coeffs[:phi])

    def zero(self) -> "CycloNum":
        return CycloNum(self, (0,) * self.phi, 1)

    def one(self) -> "CycloNum":
        return self.rational(1)

    def rational(self, value: Scalar) -> "CycloNum":
        value = Fraction(value)
        return CycloNum(self, (value.numerator,) + (0,) * (self.phi - 1), value.denominator)

    def zeta(self, exponent: int = 1) -> "CycloNum":
        """zeta_L ** exponent, reduced"""
        exponent %= self.level
        cached = self._zeta_cache.get(exponent)
        if cached is None:
            coeffs = [0] * max(exponent + 1, self.phi)
            coeffs[exponent] = 1
            cached = CycloNum(self, self.reduce(coeffs), 1)
            self._zeta_cache[exponent] = cached
        return cached

    def from_coeffs(self, coeffs: Sequence[Scalar]) -> "CycloNum":
        """Build sum c_i zeta^i from rational coefficients (any length)"""
        fractions = [Fraction(c) for c in coeffs]
        if not fractions:
            return self.zero()
        den = 1
        for f in fractions:
            den = den * f.denominator // math.gcd(den, f.denominator)
        nums = [f.numerator * (den // f.denominator) for f in fractions]
        if len(nums) < self.phi:
            nums += [0] * (self.phi - len(nums))
        return CycloNum(self, self.reduce(nums), den)

    def roots_of_unity(self) -> List["CycloNum"]:
        """Every root of unity of the field: zeta^k, and -zeta^k when L is odd"""
        roots = [self.zeta(k) for k in range(self.level)]
        if self.level % 2:
            roots += [-root for root in roots]
        return roots

    @property
    def unit_group_order(self) -> int:
        """Number of roots of unity in Q(zeta_L)"""
        return self.level if self.level % 2 == 0 else 2 * self.level


@lru_cache(maxsize=None)
def get_context(level: int) -> CycloContext:
    """Shared context for Q(zeta_L)"""
    return CycloContext(level)


class CycloNum:
    """Immutable element of Q(zeta_L)"""

    __slots__ = ("context", "_num", "_den")

    def __init__(self, context: CycloContext, num: Tuple[int, ...], den: int = 1):
        if den < 0:
            num = tuple(-n for n in num)
            den = -den
        g = math.gcd(den, *num)
        if g == 0 or not any(num):
            num = (0,) * len(num)
            den = 1
        elif g != 1:
            num = tuple(n // g for n in num)
            den //= g
        self.context = context
        self._num = num
        self._den = den

    # --- coercion -------------------------------------------------------
    def _coerce(self, other) -> "CycloNum":
        if isinstance(other, CycloNum):
            if other.context.level != self.context.level:
                raise ContextMismatchError(
                    f"cannot mix Q(zeta_{self.context.level}) and Q(zeta_{other.context.level})"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.context.rational(other)
        return NotImplemented

    # --- inspection -----------------------------------------------------
    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(n, self._den) for n in self._num)

    @property
    def level(self) -> int:
        return self.context.level

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycloNum):
            return (
                other.context.level == self.context.level
                and other._num == self._num
                and other._den == self._den
            )
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(Fraction(self._num[0], self._den))
        return hash((self.context.level, self._num, self._den))

    # --- arithmetic -----------------------------------------------------
    def __neg__(self) -> "CycloNum":
        return CycloNum(self.context, tuple(-n for n in self._num), self._den)

    def __add__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._den == other._den:
            return CycloNum(self.context, tuple(a + b for a, b in zip(self._num, other._num)), self._den)
        d1, d2 = self._den, other._den
        return CycloNum(
            self.context,
            tuple(a * d2 + b * d1 for a, b in zip(self._num, other._num)),
            d1 * d2,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            c = other._num[0]
            return CycloNum(self.context, tuple(n * c for n in self._num), self._den * other._den)
        if self.is_rational():
            c = self._num[0]
            return CycloNum(self.context, tuple(n * c for n in other._num), self._den * other._den)
        a, b = self._num, other._num
        product = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        product[i + j] += x * y
        return CycloNum(self.context, self.context.reduce(product), self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        """Multiplicative inverse via polynomial inversion modulo Phi_L"""
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(zeta_%d)" % self.context.level)
        if self.is_rational():
            return CycloNum(self.context, (self._den,) + (0,) * (self.context.phi - 1), self._num[0])
        numerator = Poly(list(reversed(self._num)), _X, domain=QQ)
        modulus = Poly(list(reversed(self.context.cyclo_poly)), _X, domain=QQ)
        inverse = numerator.invert(modulus)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inverse.all_coeffs())]
        return self.context.from_coeffs(coeffs) * self._den

    def __truediv__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "CycloNum":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "CycloNum":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = self.context.one()
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __complex__(self) -> complex:
        step = 2j * cmath.pi / self.context.level
        return complex(sum(float(c) * cmath.exp(step * i) for i, c in enumerate(self.coeffs) if c))

    def __str__(self) -> str:
        return format_coeff(self)

    def __repr__(self) -> str:
        return f"CycloNum(L={self.context.level}, {format_coeff(self)})"

    def __reduce__(self):
        return (_rebuild, (self.context.level, self._num, self._den))


def _rebuild(level: int, num: Tuple[int, ...], den: int) -> CycloNum:
    return CycloNum(get_context(level), num, den)


def root_order(u: CycloNum) -> Optional[int]:
    """
    Multiplicative order of u, or None when u is not a root of unity

    The roots of unity of Q(zeta_L) are the N-th roots with N = L for even L
    and N = 2L for odd L, so only divisors of N are tried.
    """
    if u.is_zero():
        return None
    one = u.context.one()
    n = u.context.unit_group_order
    if u ** n != one:
        return None
    for d in sympy.divisors(n):
        if u ** d == one:
            return int(d)
    return None


@dataclass(frozen=True)
class RootOfUnity:
    """zeta_L ** exponent"""

    context: CycloContext
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % self.context.level)

    @property
    def order(self) -> int:
        return self.context.level // math.gcd(self.context.level, self.exponent)

    @property
    def value(self) -> CycloNum:
        return self.context.zeta(self.exponent)


def power_relation(l1: RootOfUnity, l2: RootOfUnity) -> Optional[int]:
    """Least alpha >= 1 with l1**alpha == l2, i.e. k1*alpha = k2 (mod L)"""
    if l1.context.level != l2.context.level:
        raise ContextMismatchError("power_relation needs a common cyclotomic context")
    level = l1.context.level
    for alpha in range(1, l1.order + 1):
        if (l1.exponent * alpha - l2.exponent) % level == 0:
            return alpha
    return None


# --- coefficient strings ----------------------------------------------------

_TERM = re.compile(
    r"\s*([+-])?\s*(?:"
    r"(\d+)(?:\s*/\s*(\d+))?(?:\s*\*\s*z(?:\s*\^\s*(\d+))?)?"
    r"|z(?:\s*\^\s*(\d+))?"
    r")\s*"
)


def parse_coeff(text: str, context: CycloContext) -> CycloNum:
    """
    Parse a coefficient string such as "-1", "2/3*z^5" or "z^6+1/2"

    Args:
        text: coefficient string, z standing for zeta_L
        context: target field

    Returns:
        The reduced field element
    """
    if not isinstance(text, str) or not text.strip():
        raise GermFormatError(f"empty coefficient string: {text!r}")
    parts: Dict[int, Fraction] = {}
    pos = 0
    first = True
    while pos < len(text):
        match = _TERM.match(text, pos)
        if match is None or match.end() == pos:
            raise GermFormatError(f"cannot parse coefficient {text!r} at position {pos}")
        sign, num, den, zexp, bare_zexp = match.groups()
        if not first and sign is None:
            raise GermFormatError(f"missing '+' or '-' between terms in {text!r}")
        if num is not None:
            if den is not None and int(den) == 0:
                raise GermFormatError(f"zero denominator in {text!r}")
            value = Fraction(int(num), int(den) if den is not None else 1)
            star = "*" in match.group(0)
            exponent = (int(zexp) if zexp is not None else 1) if star else 0
        elif "z" in match.group(0):
            value = Fraction(1)
            exponent = int(bare_zexp) if bare_zexp is not None else 1
        else:
            raise GermFormatError(f"cannot parse coefficient {text!r} at position {pos}")
        if sign == "-":
            value = -value
        parts[exponent] = parts.get(exponent, Fraction(0)) + value
        pos = match.end()
        first = False
    result = context.zero()
    for exponent, value in parts.items():
        if value:
            result = result + context.zeta(exponent) * value
    return result


def _zeta_power(i: int) -> str:
    return "z" if i == 1 else f"z^{i}"


def format_coeff(u: CycloNum) -> str:
    """Canonical coefficient string, ascending powers of z"""
    pieces: List[str] = []
    for i, c in enumerate(u.coeffs):
        if not c:
            continue
        if not pieces:
            if i == 0:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(_zeta_power(i))
            else:
                pieces.append(f"{c}*{_zeta_power(i)}")
            continue
        joiner = "+" if c > 0 else "-"
        magnitude = abs(c)
        if i == 0:
            pieces.append(f"{joiner}{magnitude}")
        elif magnitude == 1:
            pieces.append(f"{joiner}{_zeta_power(i)}")
        else:
            pieces.append(f"{joiner}{magnitude}*{_zeta_power(i)}")
    return "".join(pieces) if pieces else "0"


def as_cyclo(value: Union[CycloNum, Scalar], context: CycloContext) -> CycloNum:
    """Lift a rational into the context, checking field membership of CycloNums"""
    if isinstance(value, CycloNum):
        if value.context.level != context.level:
            raise ContextMismatchError(
                f"value lives in Q(zeta_{value.context.level}), expected Q(zeta_{context.level})"
            )
        return value
    return context.rational(value)
