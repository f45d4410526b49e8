"""LR-words, continued fractions and approximability of cuts.

LR-words are plain strings over ``"LR"``; a word's continued-fraction terms
are its run lengths.  Periodic continued fractions are lists of positive
integers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Sequence

from .exact import INF, Surd, Value, compare, mobius_apply, positive_root, sign

Mat = tuple[int, int, int, int]

L_MAT: Mat = (1, 0, 1, 1)
R_MAT: Mat = (1, 1, 0, 1)
IDENTITY: Mat = (1, 0, 0, 1)


class EmptyCF(ValueError):
    pass


class EmptyPeriod(ValueError):
    pass


class Unrelated(ValueError):
    """Two periods related by none of the S/A/R symmetries."""


def matmul(m: Mat, n: Mat) -> Mat:
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def word_matrix(word: str) -> Mat:
    """Product of the letter matrices ``L = [[1,0],[1,1]]``, ``R = [[1,1],[0,1]]``."""
    a, b, c, d = IDENTITY
    for ch in word:
        if ch == "L":
            a, c = a + b, c + d
        elif ch == "R":
            b, d = a + b, c + d
        else:
            raise ValueError(f"bad letter {ch!r}")
    return (a, b, c, d)


# runs --------------------------------------------------------------------

def lr_to_runs(word: str) -> list[tuple[str, int]]:
    return [(ch, len(list(g))) for ch, g in groupby(word)]


def runs_to_lr(runs: Iterable[tuple[str, int]]) -> str:
    return "".join(ch * n for ch, n in runs)


def run_lengths(word: str) -> list[int]:
    return [n for _, n in lr_to_runs(word)]


def cyclic_runs(word: str) -> list[int] | None:
    """Run lengths of the bi-infinite word ``word^inf`` over one period.

    The word is rotated to start at a letter change so the wrap-around run is
    merged.  Returns ``None`` for a single-letter word.
    """
    if not word:
        raise ValueError("empty word")
    for i in range(len(word)):
        if word[i] != word[i - 1]:
            return run_lengths(word[i:] + word[:i])
    return None


def lr_of_cf(terms: Sequence[int]) -> str:
    """LR-word ``R^a0 L^a1 R^a2 ...`` for continued-fraction terms."""
    return "".join(("R" if i % 2 == 0 else "L") * a for i, a in enumerate(terms))


# continued fractions -----------------------------------------------------

@dataclass(frozen=True)
class ContinuedFraction:
    """``[terms..., overline{period}]``; a finite CF has an empty period."""

    terms: tuple[int, ...]
    period: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "period", tuple(self.period))
        if self.terms and self.terms[0] < 0:
            raise ValueError("a0 must be nonnegative")
        if any(t < 1 for t in self.terms[1:]) or any(t < 1 for t in self.period):
            raise ValueError("terms after a0 must be positive")

    def value(self):
        if self.period:
            return eventually_periodic_value(self.terms, self.period)
        return cf_value(self.terms)


def cf_value(terms: Sequence[int]) -> Fraction:
    if not terms:
        raise EmptyCF("empty continued fraction")
    p, q = 1, 0
    for a in reversed(terms):
        p, q = a * p + q, p
    return Fraction(p, q)


def period_matrix(period: Sequence[int]) -> Mat:
    if not period:
        raise EmptyPeriod("empty period")
    m = IDENTITY
    for b in period:
        if b < 1:
            raise ValueError("period terms must be positive")
        m = matmul(m, (b, 1, 1, 0))
    return m


def convergent_matrix(terms: Sequence[int]) -> Mat:
    m = IDENTITY
    for a in terms:
        m = matmul(m, (a, 1, 1, 0))
    return m


def periodic_value(period: Sequence[int]) -> Surd:
    """Value of the purely periodic CF ``[overline{period}]`` (a number > 1)."""
    a, b, c, d = period_matrix(period)
    # fixed point of x -> (a x + b) / (c x + d)
    return positive_root(c, d - a, -b)


def eventually_periodic_value(preperiod: Sequence[int], period: Sequence[int]) -> Surd:
    return mobius_apply(convergent_matrix(preperiod), periodic_value(period))


def rotations(seq: Sequence[int]) -> list[tuple[int, ...]]:
    t = tuple(seq)
    return [t[i:] + t[:i] for i in range(len(t))]


def minimal_period(seq: Sequence[int]) -> tuple[int, ...]:
    t = tuple(seq)
    n = len(t)
    for d in range(1, n + 1):
        if n % d == 0 and t[:d] * (n // d) == t:
            return t[:d]
    return t


def canonical_rotation(seq: Sequence[int]) -> tuple[int, ...]:
    return max(rotations(minimal_period(seq)))


def cut_quality_periodic(period: Sequence[int], i: int) -> Surd:
    """Quality of the cut at term ``i`` (1-based) of ``[overline{period}]``.

    Equals ``xi_i - conj(xi_i)`` where ``xi_i`` is the periodic value starting
    at term ``i``, i.e. ``sqrt(tr^2 - 4 det) / c`` of the rotated period matrix.
    """
    n = len(period)
    if not 1 <= i <= n:
        raise IndexError(f"cut index {i} outside 1..{n}")
    rot = list(period[i - 1 :]) + list(period[: i - 1])
    a, b, c, d = period_matrix(rot)
    return Surd.sqrt_of(Fraction(_discriminant(a, b, c, d), c * c))


def _discriminant(a: int, b: int, c: int, d: int) -> int:
    return (a + d) ** 2 - 4 * (a * d - b * c)


def lambda_periodic_sq(period: Sequence[int]) -> Fraction:
    """Square of :func:`lambda_periodic`, without building any surd.

    Every rotation has the same trace and determinant, so the best cut is
    the one with the smallest lower-left entry.
    """
    if not period:
        raise EmptyPeriod("empty period")
    n = len(period)
    best_c = None
    for i in range(n):
        a, b, c, d = period_matrix(list(period[i:]) + list(period[:i]))
        if best_c is None or c < best_c:
            best_c = c
    return Fraction(_discriminant(a, b, c, d), best_c * best_c)


def lambda_periodic(period: Sequence[int]) -> Surd:
    return Surd.sqrt_of(lambda_periodic_sq(period))


def word_power_lambda(word: str) -> Value:
    """Approximability of the periodic word ``word^inf``."""
    runs = cyclic_runs(word)
    if runs is None:
        return INF
    return lambda_periodic(runs)


# lower bounds for finite words -------------------------------------------

def _backward_tails(a: Sequence[int]) -> list[tuple[int, int]]:
    """``[0, a[i-1], ..., a[i % 2]]`` as ``(num, den)`` for every index i.

    Tails always have an even number of terms, so they can only grow when the
    word is extended on the left.
    """
    out = [(0, 1)] * len(a)
    # x = [0, a[j], ..., a[0]] and y = [0, a[j], ..., a[1]], built for growing j
    xn, xd = 0, 1
    yn, yd = 0, 1
    for j in range(len(a) - 1):
        xn, xd = xd, a[j] * xd + xn
        if j >= 1:
            yn, yd = yd, a[j] * yd + yn
        i = j + 1
        if i % 2 == 0:
            out[i] = (xn, xd)
        elif j >= 1:
            out[i] = (yn, yd)
    return out


def cut_bounds(a: Sequence[int], cut_first: bool = False) -> list[tuple[int, int]]:
    """Lower bounds ``(num, den)`` on the cut quality at every run ``1..k``.

    With ``cut_first`` the first run is cut as well (empty backward tail),
    which is valid whenever the word sits inside a longer expansion.
    """
    k = len(a) - 1
    if k < 1 and not (cut_first and a):
        return []
    back = _backward_tails(a)
    fwd = _backward_tails(a[::-1])[::-1]
    out = []
    for i in range(0 if cut_first else 1, k + 1):
        bn, bd = back[i]
        fn, fd = fwd[i]
        out.append((a[i] * bd * fd + bn * fd + fn * bd, bd * fd))
    return out


def underline_lambda_runs(a: Sequence[int], cut_first: bool = False) -> Fraction:
    best = Fraction(0)
    for n, d in cut_bounds(a, cut_first):
        if n * best.denominator > best.numerator * d:
            best = Fraction(n, d)
    return best


def underline_lambda(word: str, cut_first: bool = False) -> Fraction:
    """Least approximability of any completion of ``word`` visible from its cuts.

    The first run is not cut unless ``cut_first``; backward and forward tails
    are truncated to an even number of terms.  Words with at most one run
    give 0 by default.
    """
    return underline_lambda_runs(run_lengths(word), cut_first)


def underline_lambda_float(a: Sequence[int], cut_first: bool = False) -> float:
    k = len(a) - 1
    if k < 1:
        return float(a[0]) if cut_first and a else 0.0
    back = [0.0] * (k + 1)
    x = y = 0.0
    for j in range(k):
        x = 1.0 / (a[j] + x)
        if j >= 1:
            y = 1.0 / (a[j] + y)
        i = j + 1
        back[i] = x if i % 2 == 0 else (y if j >= 1 else 0.0)
    best = 0.0
    # x: forward tail with an even number of terms, y: with an odd number
    x, y = 0.0, math.inf
    for i in range(k, 0, -1):
        q = a[i] + back[i] + x
        if q > best:
            best = q
        x, y = 1.0 / (a[i] + y), 1.0 / (a[i] + x)
    if cut_first and a[0] + x > best:
        best = a[0] + x
    return best


# symmetry classes ----------------------------------------------------------

def is_rotation(p: Sequence[int], q: Sequence[int]) -> bool:
    p, q = minimal_period(p), minimal_period(q)
    return len(p) == len(q) and tuple(q) in rotations(p)


def is_palindromic_cycle(p: Sequence[int]) -> bool:
    return is_rotation(p, list(p)[::-1])


def classify_symmetry(period1: Sequence[int], period2: Sequence[int]) -> str:
    if not period1 or not period2:
        raise EmptyPeriod("empty period")
    if is_rotation(period1, period2):
        return "S" if is_palindromic_cycle(period1) else "A"
    if is_rotation(period1, list(period2)[::-1]):
        return "R"
    raise Unrelated(f"{list(period1)} and {list(period2)}")


# text formats ----------------------------------------------------------------

# as in TeX, an unbraced exponent is a single digit: "1^82" is 1^8 then 2
_DIGIT = re.compile(r"(\d)(?:\^(?:\{(\d+)\}|(\d)))?")
_DIGITS = re.compile(r"(?:\d(?:\^(?:\{\d+\}|\d))?)+")


def parse_cf(text: str) -> list[int]:
    """``"[2,2,1,1]"``, ``"2,2,1,1"``, ``"2211"``, ``"221^7"`` or ``"1^{12}"``."""
    s = "".join(text.split()).strip("[]")
    if not s:
        raise EmptyPeriod("empty continued fraction text")
    if "," in s:
        return [int(t) for t in s.split(",")]
    if not _DIGITS.fullmatch(s):
        raise ValueError(f"cannot parse continued fraction {text!r}")
    out: list[int] = []
    for m in _DIGIT.finditer(s):
        out += [int(m.group(1))] * int(m.group(2) or m.group(3) or 1)
    return out


def format_cf(terms: Sequence[int]) -> str:
    return "[" + ",".join(str(t) for t in terms) + "]"


def format_digits(terms: Sequence[int]) -> str:
    if any(t > 9 for t in terms):
        return format_cf(terms)
    return "".join(str(t) for t in terms)


# quadratic irrational expansion ------------------------------------------------

def surd_cf(x: Surd, limit: int = 100_000) -> ContinuedFraction:
    """Eventually periodic continued fraction of a positive quadratic irrational."""
    if x.v == 0 or x.sign() <= 0:
        raise ValueError(f"{x} is not a positive quadratic irrational")
    # write x = (P + sqrt(N)) / Q with Q | N - P^2
    D = x.D
    P, Q = x.u * x.w, x.w * x.w
    N = x.v * x.v * D * x.w * x.w
    if x.v < 0:
        # (u - |v| sqrt D)/w = (-u + |v| sqrt D)/(-w)
        P, Q = -P, -Q
    r = math.isqrt(N)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    for _ in range(limit):
        key = (P, Q)
        if key in seen:
            start = seen[key]
            return ContinuedFraction(terms[:start], minimal_period(terms[start:]))
        seen[key] = len(terms)
        # floor((P + sqrt N)/Q) for either sign of Q
        if Q > 0:
            a = (P + r) // Q
        else:
            a = (P + r + 1) // Q
        terms.append(a)
        P = a * Q - P
        Q = (N - P * P) // Q
    raise RuntimeError("continued fraction period not found")
