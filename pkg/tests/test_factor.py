import math

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from plagrange.factor import factorize, is_prime, pollard_rho, square_decompose, squarefree_part


def test_small_primes_match_sieve():
    sieve = [p for p in range(2, 5000) if all(p % q for q in range(2, math.isqrt(p) + 1))]
    assert [n for n in range(5000) if is_prime(n)] == sieve


def test_squarefree_examples():
    assert squarefree_part(9 * 1 - 4) == 5
    assert squarefree_part(9 * 4 - 4) == 2
    assert square_decompose(49) == (7, 1)
    assert square_decompose(245) == (7, 5)


def test_pollard_rho_semiprime():
    n = 1000003 * 1000033
    d = pollard_rho(n)
    assert d in (1000003, 1000033)


@settings(max_examples=300)
@given(st.integers(2, 10**15))
def test_factorize_against_sympy(n):
    assert factorize(n) == sympy.factorint(n)


@given(st.integers(1, 10**12))
def test_square_decompose(n):
    s, d = square_decompose(n)
    assert s * s * d == n
    assert all(e == 1 for e in factorize(d).values()) if d > 1 else d == 1
