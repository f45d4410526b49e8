"""Integer factorization helpers: primality, Pollard rho, squarefree parts."""

from __future__ import annotations

import math
import random
import time

TRIAL_LIMIT = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class FactorizationTimeout(RuntimeError):
    pass


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


_PRIMES: list[int] | None = None


def _trial_primes() -> list[int]:
    global _PRIMES
    if _PRIMES is None:
        _PRIMES = _sieve(TRIAL_LIMIT)
    return _PRIMES


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (bases 2..41 are exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_rho(n: int, deadline: float | None = None, seed: int = 1) -> int:
    """Return a nontrivial factor of the composite ``n`` (Brent's variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                if deadline is not None and time.monotonic() > deadline:
                    raise FactorizationTimeout(n)
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, timeout: float | None = None) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``.

    Trial division up to ``TRIAL_LIMIT``, then Pollard rho on the cofactor.
    Raises ``FactorizationTimeout`` if ``timeout`` seconds elapse.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    deadline = None if timeout is None else time.monotonic() + timeout
    out: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= TRIAL_LIMIT**2 or is_prime(m):
            # cofactor below TRIAL_LIMIT**2 with no small factor is prime
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = pollard_rho(m, deadline)
        stack += [f, m // f]
    return dict(sorted(out.items()))


def square_decompose(n: int, timeout: float | None = None) -> tuple[int, int]:
    """Write ``n >= 0`` as ``s**2 * d`` with ``d`` squarefree; return ``(s, d)``."""
    if n == 0:
        return 0, 0
    r = math.isqrt(n)
    if r * r == n:
        return r, 1
    s = d = 1
    for p, e in factorize(n, timeout).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


def squarefree_part(n: int, timeout: float | None = None) -> int:
    return square_decompose(n, timeout)[1]
