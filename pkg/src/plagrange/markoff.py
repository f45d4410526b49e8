"""Markoff triples, their spectrum points and the congruence filters.

A Markoff triple ``x <= y <= z`` solves ``x^2 + y^2 + z^2 = 3xyz``; its
largest entry gives the point ``sqrt(9z^2 - 4)/z`` of the Lagrange spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import Surd
from .factor import FactorizationTimeout, is_prime, squarefree_part

Triple = tuple[int, int, int]


class NotPrime(ValueError):
    pass


def is_markoff(t: Triple) -> bool:
    x, y, z = t
    return x * x + y * y + z * z == 3 * x * y * z


def neighbours(t: Triple) -> list[Triple]:
    """The three Vieta involutions, each result sorted."""
    x, y, z = t
    return [
        tuple(sorted((3 * y * z - x, y, z))),
        tuple(sorted((x, 3 * x * z - y, z))),
        tuple(sorted((x, y, 3 * x * y - z))),
    ]


def enumerate_triples(z_bound: int) -> list[Triple]:
    """All Markoff triples with largest entry at most ``z_bound``, sorted by z."""
    if z_bound < 1:
        return []
    seen = {(1, 1, 1)}
    work = [(1, 1, 1)]
    while work:
        t = work.pop()
        for u in neighbours(t):
            if u[2] <= z_bound and u not in seen:
                seen.add(u)
                work.append(u)
    return sorted(seen, key=lambda t: (t[2], t))


def lambda_z(z: int) -> Surd:
    return Surd.sqrt_of(Fraction(9 * z * z - 4, z * z))


def discriminant(z: int) -> int:
    n = 9 * z * z - 4
    return n if z % 2 else n // 4


@dataclass(frozen=True)
class MarkoffPoint:
    triple: Triple
    value: Surd
    D: int

    @classmethod
    def of(cls, t: Triple) -> MarkoffPoint:
        return cls(t, lambda_z(t[2]), discriminant(t[2]))

    @property
    def z(self) -> int:
        return self.triple[2]

    def to_json(self, timeout: float | None = 5.0) -> dict:
        n, d = self.value.root_form()
        return {
            "z": self.z,
            "triple": list(self.triple),
            "lambda": {"N": n, "d": d},
            "lambda_text": str(self.value),
            "D": self.D,
            "squarefree_part": squarefree_part(9 * self.z * self.z - 4, timeout),
        }


# congruence filters ---------------------------------------------------------

def is_square_mod(p: int, q: int) -> bool:
    """Euler's criterion for an odd prime ``q``; ``0`` counts as a square."""
    r = p % q
    return r == 0 or pow(r, (q - 1) // 2, q) == 1


def _case_a(p):
    return p % 5 in (0, 1, 4)


def _case_b(p):
    return p % 8 in (2, 1, 7)


def _case_c(p):
    return is_square_mod(p, 13) and is_square_mod(p, 17)


def _case_d(p):
    return is_square_mod(p, 37) and is_square_mod(p, 41)


def _case_e(p):
    return all(is_square_mod(p, q) for q in (5, 17, 89))


def _case_f(p):
    return p % 8 in (1, 7) and is_square_mod(p, 13)


# label, triple, condition
CASES = (
    ("a", (1, 1, 1), _case_a),
    ("b", (1, 1, 2), _case_b),
    ("c", (1, 2, 5), _case_c),
    ("d", (1, 5, 13), _case_d),
    ("e", (2, 5, 29), _case_e),
    ("f", (1, 13, 34), _case_f),
)


def corollary_cases(p: int) -> dict[str, bool]:
    if not is_prime(p):
        raise NotPrime(p)
    return {label: cond(p) for label, _, cond in CASES}


def corollary_filter(p: int) -> list[MarkoffPoint]:
    """Markoff points that the congruence conditions place in the p-spectrum."""
    fired = corollary_cases(p)
    return [MarkoffPoint.of(t) for label, t, _ in CASES if fired[label]]


# strong uniqueness ------------------------------------------------------------

@dataclass
class UniquenessReport:
    z_bound: int
    triples: int
    repeated_max: list[int] = field(default_factory=list)
    collisions: list[tuple[int, int, int]] = field(default_factory=list)  # (d, z1, z2)
    timeouts: list[int] = field(default_factory=list)
    not_markoff: list[Triple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.repeated_max or self.collisions or self.not_markoff)

    def to_json(self) -> dict:
        return {
            "z_bound": self.z_bound,
            "triples": self.triples,
            "repeated_max": self.repeated_max,
            "collisions": [list(c) for c in self.collisions],
            "timeouts": self.timeouts,
            "not_markoff": [list(t) for t in self.not_markoff],
            "ok": self.ok,
        }


def strong_uniqueness_check(z_bound: int, timeout: float | None = 5.0) -> UniquenessReport:
    """Squarefree parts of ``9z^2 - 4`` must be pairwise distinct.

    A shared squarefree part would put two Markoff points in the same real
    quadratic field.  Also checks that each ``z`` is the maximum of only one
    triple.
    """
    triples = enumerate_triples(z_bound)
    rep = UniquenessReport(z_bound, len(triples))
    rep.not_markoff = [t for t in triples if not is_markoff(t)]
    seen_z: set[int] = set()
    by_part: dict[int, int] = {}
    for t in triples:
        z = t[2]
        if z in seen_z:
            rep.repeated_max.append(z)
            continue
        seen_z.add(z)
        try:
            d = squarefree_part(9 * z * z - 4, timeout)
        except FactorizationTimeout:
            rep.timeouts.append(z)
            continue
        if d in by_part:
            rep.collisions.append((d, by_part[d], z))
        else:
            by_part[d] = z
    return rep
