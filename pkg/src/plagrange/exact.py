"""Exact values in real quadratic fields.

A :class:`Surd` is ``(u + v*sqrt(D)) / w`` kept in a canonical form (``D``
squarefree, ``gcd(u, v, w) == 1``, ``w > 0``), so equality is structural and
ordering is decided with integer arithmetic only.  ``INF`` stands in for the
approximability of words with a constant tail.

Rationals are plain :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .factor import square_decompose

Rational = Fraction


class MixedFieldError(ArithmeticError):
    """Raised when adding elements of two different quadratic fields."""


class NegativeDiscriminant(ValueError):
    pass


def sign(n: int) -> int:
    return (n > 0) - (n < 0)


def sign_of(a: int, b: int, D: int) -> int:
    """Sign of ``a + b*sqrt(D)`` for integers ``a, b`` and ``D >= 0``."""
    sa = sign(a)
    sb = sign(b) if D else 0
    if sb == 0 or sa == sb:
        return sa or sb
    if sa == 0:
        return sb
    # opposite signs: the larger magnitude wins
    lhs, rhs = a * a, b * b * D
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


@total_ordering
class _PositiveInfinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("plagrange.INF")

    def __lt__(self, other) -> bool:
        return False

    def __gt__(self, other) -> bool:
        return other is not self

    def __reduce__(self):
        return (_PositiveInfinity, ())

    def __float__(self) -> float:
        return math.inf

    is_infinite = True


INF = _PositiveInfinity()


@total_ordering
class Surd:
    """The real number ``(u + v*sqrt(D)) / w``."""

    __slots__ = ("u", "v", "D", "w")
    is_infinite = False

    def __init__(self, u: int, v: int = 0, D: int = 1, w: int = 1):
        if w == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if D < 0:
            raise ValueError("negative radicand")
        if w < 0:
            u, v, w = -u, -v, -w
        if v == 0 or D == 0:
            v, D = 0, 1
        elif D != 1:
            s, D = square_decompose(D)
            v *= s
        if D == 1:
            u, v = u + v, 0
        g = math.gcd(math.gcd(u, v), w)
        object.__setattr__(self, "u", u // g)
        object.__setattr__(self, "v", v // g)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "w", w // g)

    def __setattr__(self, name, value):
        raise AttributeError("Surd is immutable")

    @classmethod
    def from_rational(cls, q) -> Surd:
        q = Fraction(q)
        return cls(q.numerator, 0, 1, q.denominator)

    @classmethod
    def sqrt_of(cls, q) -> Surd:
        """Nonnegative square root of a nonnegative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        n, d = q.numerator, q.denominator
        r = math.isqrt(d)
        if r * r == d:
            return cls(0, 1, n, r)
        # sqrt(n/d) = sqrt(n*d)/d
        return cls(0, 1, n * d, d)

    # structure -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def rational(self) -> Fraction:
        if self.v:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.u, self.w)

    def square(self) -> Surd:
        return self * self

    def conjugate(self) -> Surd:
        return Surd(self.u, -self.v, self.D, self.w)

    def root_form(self) -> tuple[int, int]:
        """``(N, d)`` with ``self == sqrt(N)/d`` for a nonnegative pure root."""
        if self.u != 0 or self.v < 0:
            raise ValueError(f"{self} is not a nonnegative pure square root")
        return self.v * self.v * self.D, self.w

    # arithmetic ----------------------------------------------------------

    def _field(self, other: Surd) -> int:
        if self.v == 0:
            return other.D
        if other.v == 0 or other.D == self.D:
            return self.D
        raise MixedFieldError(f"Q(sqrt({self.D})) vs Q(sqrt({other.D}))")

    @staticmethod
    def _coerce(x) -> Surd:
        if isinstance(x, Surd):
            return x
        if isinstance(x, (int, Fraction)):
            return Surd.from_rational(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = self._field(other)
        return Surd(
            self.u * other.w + other.u * self.w,
            self.v * other.w + other.v * self.w,
            D,
            self.w * other.w,
        )

    __radd__ = __add__

    def __neg__(self) -> Surd:
        return Surd(-self.u, -self.v, self.D, self.w)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = self._field(other)
        return Surd(
            self.u * other.u + self.v * other.v * D,
            self.u * other.v + self.v * other.u,
            D,
            self.w * other.w,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self) -> Surd:
        # w / (u + v sqrt D) = w (u - v sqrt D) / (u^2 - v^2 D)
        norm = self.u * self.u - self.v * self.v * self.D
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return Surd(self.w * self.u, -self.w * self.v, self.D, norm)

    def __abs__(self) -> Surd:
        return -self if self.sign() < 0 else self

    def multiply_rational(self, q) -> Surd:
        q = Fraction(q)
        return Surd(self.u * q.numerator, self.v * q.numerator, self.D, self.w * q.denominator)

    # ordering ------------------------------------------------------------

    def sign(self) -> int:
        return sign_of(self.u, self.v, self.D)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Surd.from_rational(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return (self.u, self.v, self.D, self.w) == (other.u, other.v, other.D, other.w)

    def __hash__(self) -> int:
        if self.v == 0:
            return hash(Fraction(self.u, self.w))
        return hash((self.u, self.v, self.D, self.w))

    def __lt__(self, other) -> bool:
        if other is INF:
            return True
        if isinstance(other, (int, Fraction)):
            other = Surd.from_rational(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return compare(self, other) < 0

    def __bool__(self) -> bool:
        return bool(self.u or self.v)

    # rendering -----------------------------------------------------------

    def __float__(self) -> float:
        return float(self.to_decimal(30))

    def to_decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            val = (Decimal(self.u) + Decimal(self.v) * Decimal(self.D).sqrt()) / Decimal(self.w)
            ctx.prec = digits
            return +val

    def decimal_str(self, significant: int = 15) -> str:
        return format(self.to_decimal(significant), "f")

    def __str__(self) -> str:
        return format_surd(self)

    def __repr__(self) -> str:
        return f"Surd({self.u}, {self.v}, {self.D}, {self.w})"

    def __reduce__(self):
        return (Surd, (self.u, self.v, self.D, self.w))


Value = Union[Surd, _PositiveInfinity]


def compare(x: Value, y: Value) -> int:
    """Exact three-way comparison: -1, 0 or 1."""
    if x is INF or y is INF:
        return (x is INF) - (y is INF)
    if x.D == y.D or x.v == 0 or y.v == 0:
        D = y.D if x.v == 0 else x.D
        return sign_of(x.u * y.w - y.u * x.w, x.v * y.w - y.v * x.w, D)
    # a + b sqrt(D1) - c sqrt(D2) after clearing the (positive) denominators
    a = x.u * y.w - y.u * x.w
    b, D1 = x.v * y.w, x.D
    c, D2 = y.v * x.w, y.D
    # compare L = a + b sqrt(D1) against R = c sqrt(D2)
    sl, sr = sign_of(a, b, D1), sign(c)
    if sl != sr:
        return sign(sl - sr)
    if sl == 0:
        return 0
    # same sign: compare L^2 with R^2, flipping if both negative
    sq = sign_of(a * a + b * b * D1 - c * c * D2, 2 * a * b, D1)
    return sq if sl > 0 else -sq


def vmax(*values: Value) -> Value:
    best = values[0]
    for x in values[1:]:
        if compare(x, best) > 0:
            best = x
    return best


def vmin(*values: Value) -> Value:
    best = values[0]
    for x in values[1:]:
        if compare(x, best) < 0:
            best = x
    return best


def mobius_apply(M, x: Surd) -> Surd:
    """``(a*x + b) / (c*x + d)`` for an integer matrix ``M = (a, b, c, d)``."""
    a, b, c, d = M
    num = Surd(a * x.u + b * x.w, a * x.v, x.D, x.w)
    den = Surd(c * x.u + d * x.w, c * x.v, x.D, x.w)
    if not den:
        raise ZeroDivisionError("mobius denominator vanishes")
    return num / den


def positive_root(a: int, b: int, c: int) -> Surd:
    """Larger real root of ``a*x**2 + b*x + c``."""
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    g = math.gcd(math.gcd(a, b), c)
    a, b, c = a // g, b // g, c // g
    disc = b * b - 4 * a * c
    if disc < 0:
        raise NegativeDiscriminant(f"{a}x^2 + {b}x + {c}")
    if a > 0:
        return Surd(-b, 1, disc, 2 * a)
    return Surd(b, 1, disc, -2 * a)


# text format -------------------------------------------------------------

def format_surd(x: Value) -> str:
    if x is INF:
        return "inf"
    u, v, D, w = x.u, x.v, x.D, x.w
    if v == 0:
        return str(u) if w == 1 else f"{u}/{w}"
    rad = f"sqrt({D})" if abs(v) == 1 else f"{abs(v)}*sqrt({D})"
    if u == 0:
        num = rad if v > 0 else "-" + rad
        return num if w == 1 else f"{num}/{w}"
    num = f"{u}{'+' if v > 0 else '-'}{rad}"
    return num if w == 1 else f"({num})/{w}"


_INNER = re.compile(
    r"(?:(?P<u>-?\d+)(?:(?P<s>[+-])(?:(?P<v>\d+)\*)?sqrt\((?P<D>\d+)\))?"
    r"|(?P<s2>-?)(?:(?P<v2>\d+)\*)?sqrt\((?P<D2>\d+)\))"
)


def parse_surd(text: str) -> Value:
    """Inverse of :func:`format_surd` (whitespace tolerated)."""
    s = "".join(text.split())
    if s in ("inf", "+inf", "oo"):
        return INF
    w = 1
    m = re.fullmatch(r"(.*)/(\d+)", s)
    if m and (m.group(1).endswith(")") or re.fullmatch(r"-?\d+", m.group(1))):
        s, w = m.group(1), int(m.group(2))
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    m = _INNER.fullmatch(s)
    if not m:
        raise ValueError(f"cannot parse surd {text!r}")
    if m.group("u") is not None:
        u = int(m.group("u"))
        if m.group("D") is None:
            return Surd(u, 0, 1, w)
        v = int(m.group("v") or 1) * (1 if m.group("s") == "+" else -1)
        return Surd(u, v, int(m.group("D")), w)
    v = int(m.group("v2") or 1) * (-1 if m.group("s2") == "-" else 1)
    return Surd(0, v, int(m.group("D2")), w)
