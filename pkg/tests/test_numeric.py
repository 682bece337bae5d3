from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladditive.numeric import (
    SIEVE_LIMIT,
    factorize,
    format_rational,
    is_prime,
    nu,
    parse_rational,
    prime_multiset,
    smallest_prime_factors,
)


def trial_division(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def test_factorize_examples():
    assert factorize(1) == ()
    assert factorize(360).as_dict() == {2: 3, 3: 2, 5: 1} == trial_division(360)
    m61 = 2**61 - 1
    assert factorize(m61).as_dict() == {m61: 1}


def test_factorize_rejects_zero():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(TypeError):
        factorize(2.0)


@given(st.integers(1, 2 * 10**6))
def test_factorize_matches_trial_division(n):
    assert factorize(n).as_dict() == trial_division(n)


def test_round_trip_to_ten_to_six():
    for n in range(1, SIEVE_LIMIT + 1):
        fac = factorize(n)
        out = 1
        for p, e in fac:
            out *= p**e
        assert out == n


@pytest.mark.parametrize("n, expected", [
    ((2**31 - 1) * (2**61 - 1), {2**31 - 1: 1, 2**61 - 1: 1}),
    (1000003 * 1000033, {1000003: 1, 1000033: 1}),
    (2**64 * 3**5 * 999983, {2: 64, 3: 5, 999983: 1}),
    ((2**89 - 1) * 1000003**2, {1000003: 2, 2**89 - 1: 1}),
    (2**127 - 1, {2**127 - 1: 1}),
])
def test_factorize_large(n, expected):
    fac = factorize(n)
    assert fac.as_dict() == expected
    assert fac.primes() == sorted(fac.primes())


def test_is_prime_examples():
    assert is_prime(2)
    assert not is_prime(1)
    assert not is_prime(0)
    assert not is_prime(561)
    assert trial_division(561) == {3: 1, 11: 1, 17: 1}


def test_sieve_agrees_with_naive_primality():
    spf = smallest_prime_factors()
    for n in range(2, 20000):
        assert (spf[n] == n) == naive_is_prime(n)
        assert n % spf[n] == 0


@given(st.integers(SIEVE_LIMIT - 100, 10**10))
@settings(max_examples=200, deadline=None)
def test_is_prime_above_sieve(n):
    assert is_prime(n) == naive_is_prime(n)


@pytest.mark.parametrize("n", [
    2**89 - 1, 2**107 - 1, 2**127 - 1,  # Mersenne primes above the Miller-Rabin proven bound
])
def test_large_primes(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [
    (2**89 - 1) * (2**31 - 1),
    (2**61 - 1) ** 2,
    2**128 + 1,  # F7, composite
    3825123056546413051,  # strong pseudoprime to the first nine prime bases
    318665857834031151167461,  # strong pseudoprime to the first twelve prime bases
    3317044064679887385961981,  # strong pseudoprime to the first thirteen prime bases
])
def test_large_composites(n):
    assert not is_prime(n)


def test_strong_pseudoprime_to_small_bases():
    assert not is_prime(3215031751)  # passes Miller-Rabin at bases 2, 3, 5 and 7


def test_nu():
    assert nu(360, 2) == 3
    assert nu(360, 7) == 0
    assert nu(1, 13) == 0
    with pytest.raises(ValueError):
        nu(360, 4)


def test_prime_multiset():
    assert prime_multiset(12) == [2, 2, 3]
    assert prime_multiset(7) == [7]
    assert prime_multiset(1) == []


@given(st.integers(1, 10**3), st.integers(1, 10**3), st.sampled_from([2, 3, 5, 7, 11, 47]))
def test_nu_additive(m, n, p):
    assert nu(m * n, p) == nu(m, p) + nu(n, p)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6),
       st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_rational_sum_canonical(a, b, c, d):
    s = Fraction(a, b) + Fraction(c, d)
    num, den = a * d + c * b, b * d
    g = gcd(num, den)
    assert (s.numerator, s.denominator) == (num // g, den // g)
    assert gcd(abs(s.numerator), s.denominator) == 1 and s.denominator >= 1


@pytest.mark.parametrize("text, value", [("0", 0), ("7", 7), ("-3/4", Fraction(-3, 4)),
                                         ("12345678901234567890/7", Fraction(12345678901234567890, 7))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value
    assert format_rational(value) == text


@pytest.mark.parametrize("text", ["2/4", "3/1", "+1", "1.5", " 1", "1/0", "-0", "01", "1/-2", "", "a"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)
