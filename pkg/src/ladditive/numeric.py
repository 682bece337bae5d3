"""Integers, exact rationals, primality and factorization.

Everything above this module evaluates on :class:`fractions.Fraction`, which
is always kept in lowest terms with a positive denominator.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

Rational = Fraction

SIEVE_LIMIT = 10**6

# Deterministic Miller-Rabin with these bases is exact below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_EXACT_BELOW = 3_317_044_064_679_887_385_961_981

_RATIONAL_RE = re.compile(r"^(-?)(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$")


class Factorization(tuple):
    """Sorted ``(prime, exponent)`` pairs with strictly increasing primes."""

    def __new__(cls, pairs=()):
        return super().__new__(cls, tuple((int(p), int(e)) for p, e in pairs))

    @classmethod
    def _trusted(cls, pairs: list) -> "Factorization":
        return tuple.__new__(cls, pairs)

    def as_dict(self) -> Dict[int, int]:
        return dict(self)

    def primes(self) -> List[int]:
        return [p for p, _ in self]

    def value(self) -> int:
        out = 1
        for p, e in self:
            out *= p**e
        return out

    def omega(self) -> int:
        """Number of prime factors counted with multiplicity."""
        return sum(e for _, e in self)

    def __repr__(self):
        return "Factorization({%s})" % ", ".join(f"{p}: {e}" for p, e in self)


@lru_cache(maxsize=None)
def smallest_prime_factors(limit: int = SIEVE_LIMIT) -> List[int]:
    """Smallest-prime-factor table for ``0..limit`` (entries 0 and 1 are 0)."""
    spf = list(range(limit + 1))
    spf[0] = spf[1] = 0
    small = [p for p in range(2, math.isqrt(limit) + 1)
             if all(p % d for d in range(2, math.isqrt(p) + 1))]
    # Descending so the smallest prime writes last.
    for p in reversed(small):
        start = p * p
        spf[start::p] = [p] * len(range(start, limit + 1, p))
    return spf


@lru_cache(maxsize=None)
def primes_up_to(limit: int = SIEVE_LIMIT) -> Tuple[int, ...]:
    if limit <= SIEVE_LIMIT:
        spf = smallest_prime_factors()
        return tuple(p for p in range(2, limit + 1) if spf[p] == p)
    spf = smallest_prime_factors(limit)
    return tuple(p for p in range(2, limit + 1) if spf[p] == p)


def _miller_rabin(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    d = 5
    while True:
        j = _jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
        if d == 13 and math.isqrt(n) ** 2 == n:
            return False
    p, q = 1, (1 - d) // 4
    k, s = n + 1, 0
    while k % 2 == 0:
        k //= 2
        s += 1
    inv2 = (n + 1) // 2

    u, v, qk = 1, p, q % n
    for bit in bin(k)[3:]:
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (p * u + v) * inv2 % n, (d * u + p * v) * inv2 % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality.

    Table lookup up to ``SIEVE_LIMIT``, Miller-Rabin with a proven base set
    below ~3.3e24, Baillie-PSW above that.
    """
    if n < 2:
        return False
    if n <= SIEVE_LIMIT:
        return smallest_prime_factors()[n] == n
    for p in _MR_BASES:
        if n % p == 0:
            return False
    if n < _MR_EXACT_BELOW:
        return all(_miller_rabin(n, a) for a in _MR_BASES)
    return _miller_rabin(n, 2) and _strong_lucas(n)


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
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
    raise ArithmeticError(f"rho failed to split {n}")


def _split(n: int, out: Dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> Factorization:
    """Prime factorization of a positive integer."""
    n = _check_positive(n)
    if n <= SIEVE_LIMIT:
        spf = smallest_prime_factors()
        pairs = []
        while n > 1:
            p = spf[n]
            n //= p
            e = 1
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return Factorization._trusted(pairs)
    out: Dict[int, int] = {}
    for p in primes_up_to():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n <= SIEVE_LIMIT**2:
            out[n] = out.get(n, 0) + 1
        else:
            _split(n, out)
    return Factorization(sorted(out.items()))


def nu(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``."""
    n = _check_positive(n)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def prime_multiset(n: int) -> List[int]:
    """Prime factors of ``n`` with multiplicity, nondecreasing."""
    return [p for p, e in factorize(n) for _ in range(e)]


def iter_primes(limit: int) -> Iterator[int]:
    return iter(primes_up_to(limit))


def _check_positive(n) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"expected an integer, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    return n


def parse_rational(text: str) -> Fraction:
    """Parse ``"a"`` or ``"a/b"`` in lowest terms with ``b > 0``.

    Non-canonical input (``"2/4"``, ``"3/1"``, ``"+1"``, ``"1.5"``) is rejected.
    """
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}")
    value = Fraction(text)
    if format_rational(value) != text or text == "-0":
        raise ValueError(f"rational {text!r} is not in lowest terms")
    return value


def format_rational(value) -> str:
    """Canonical ``"a"`` / ``"a/b"`` form."""
    return str(Fraction(value))
