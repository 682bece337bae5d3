"""Arithmetic subderivatives straight from their definition.

``D_S(n) = n * sum(nu_p(n) / p for p in S)`` and ``ld_S(n) = D_S(n) / n``.
These deliberately do not go through :mod:`ladditive.functions`, so the two
can check each other.
"""

from __future__ import annotations

from fractions import Fraction

from .functions import PrimeSet
from .numeric import factorize, is_prime

ALL_PRIMES = PrimeSet.all()


def subderivative(n: int, S: PrimeSet) -> int:
    S.require_nonempty()
    total = 0
    for p, e in factorize(n):
        if p in S:
            term, rem = divmod(e * n, p)
            if rem:
                raise ArithmeticError(f"n * nu_p(n) / p is not integral at n={n}, p={p}")
            total += term
    return total


def arithmetic_derivative(n: int) -> int:
    return subderivative(n, ALL_PRIMES)


def partial_derivative(n: int, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return subderivative(n, PrimeSet.of(p))


def log_subderivative(n: int, S: PrimeSet) -> Fraction:
    S.require_nonempty()
    return sum((Fraction(e, p) for p, e in factorize(n) if p in S), Fraction(0))
