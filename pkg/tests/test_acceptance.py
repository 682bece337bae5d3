"""End-to-end acceptance checks, all in exact arithmetic.

Each test carries a ``criterion`` marker; ``conftest.py`` prints one PASS/FAIL
line per criterion at the end of the run.
"""

import random
from fractions import Fraction
from math import isqrt

import pytest

from ladditive.bounds import (
    EQUAL,
    PRECONDITION,
    classic_bounds,
    extended_lower,
    extended_upper,
    extended_westrick,
    westrick_bound,
)
from ladditive.functions import (
    DefaultRule,
    LAdditiveSpec,
    PrimeMap,
    PrimeSet,
    builtin,
    eval_c_additive,
    eval_c_multiplicative,
    eval_l_additive,
)
from ladditive.reconstruction import (
    SpecView,
    check_conditions,
    check_l_additive,
    decompose,
    reconstruct_h,
    support_partition,
    tabulate,
    witness_ratios,
)
from ladditive.subderivative import subderivative
from ladditive.sweep import SweepConfig, definition_oracle_D, report_json, run_sweep

D = builtin("D")
D2 = builtin("D_S", PrimeSet.of(2))
D25 = builtin("D_S", PrimeSet.of(2, 5))
THETA = builtin("theta")
LD = LAdditiveSpec.from_c_additive(builtin("ld"), "ld")


def eratosthenes(limit):
    """Plain byte sieve, independent of the package's smallest-factor table."""
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = bytearray(len(range(p * p, limit + 1, p)))
    return [p for p in range(limit + 1) if flags[p]]


@pytest.fixture(scope="module")
def primes_to_million():
    return eratosthenes(10**6)


@pytest.fixture(scope="module")
def d_table():
    return tabulate(D, 10**4)


@pytest.mark.criterion("Leibniz identity on [1, 300]^2 for D, D_{2}, D_{2,5}, ld, theta")
def test_leibniz_identity():
    needed = sorted({m * n for m in range(1, 301) for n in range(1, 301)})
    for spec in (D, D2, D25, LD, THETA):
        f = {n: eval_l_additive(spec, n) for n in needed}
        h = {n: eval_c_multiplicative(spec.h, n) for n in range(1, 301)}
        for m in range(1, 301):
            fm, hm = f[m], h[m]
            for n in range(1, 301):
                assert f[m * n] == fm * h[n] + f[n] * hm, (spec.name, m, n)


@pytest.mark.criterion("evaluation = subderivative = definition oracle on [1, 10^5]")
def test_evaluation_consistency():
    for S in (PrimeSet.all(), PrimeSet.of(2), PrimeSet.of(3), PrimeSet.of(2, 5)):
        spec = D if S.kind == "all" else builtin("D_S", S)
        for n in range(1, 10**5 + 1):
            d = subderivative(n, S)
            assert eval_l_additive(spec, n) == d == definition_oracle_D(n, S), (S, n)


@pytest.mark.criterion("h_f reconstruction from tabulated D, D_{2}, D_{2,5}")
def test_reconstruction(d_table):
    small = eratosthenes(97)
    h = reconstruct_h(d_table, 97)
    assert all(h.y(p) == p for p in small)
    assert support_partition(d_table, 97).v_primes == ()

    t2 = tabulate(D2, 10**4)
    part = support_partition(t2, 97)
    assert part.u_primes == (2,) and part.v_primes == tuple(small[1:])
    h2 = reconstruct_h(t2, 97)
    assert all(h2.y(p) == p for p in small)
    for p in part.v_primes:
        ratios = witness_ratios(t2, p, 97)
        assert ratios == {2: p}

    t25 = tabulate(D25, 10**4)
    part = support_partition(t25, 97)
    assert part.u_primes == (2, 5)
    for p in part.v_primes:
        assert witness_ratios(t25, p, 97) == {2: p, 5: p}
    assert all(reconstruct_h(t25, 97).y(p) == p for p in small)


@pytest.mark.criterion("decomposition of D into ld and N; g h = D on [1, 10^4]")
def test_decomposition():
    g, h = decompose(D)
    for p in eratosthenes(97):
        assert g.x(p) == Fraction(1, p) and h.y(p) == p
    for n in range(1, 10**4 + 1):
        assert eval_c_additive(g, n) * eval_c_multiplicative(h, n) == eval_l_additive(D, n)


@pytest.mark.criterion("prime-power conditions for D, D_{2,5}; corrupted table rejected")
def test_conditions(d_table):
    for spec, expect_v in ((D, False), (D25, True)):
        report = check_conditions(SpecView(spec, 10**12), 3, 30, additivity=False)
        assert report.violated() == []
        for c in ("i", "ii", "iv"):
            assert report[c].status == "holds" and report[c].skipped == 0
        part = support_partition(SpecView(spec, 10**12), 30)
        if expect_v:
            assert report["iii"].status == "holds" and report["iii"].skipped == 0
        else:
            assert part.v_primes == () and report["iii"].status == "vacuous"

    corrupted = d_table.replace(4, 3).replace(8, 5)
    result = check_l_additive(corrupted)
    assert not result.accepted
    assert result.report["g-additive"].witness == {"m": 2, "n": 4}
    assert result.describe() == "rejected: g(8) ≠ g(2)+g(4)"


@pytest.mark.criterion("classic bound chain on [2, 10^6] with observed equality sets")
def test_classic_chain(primes_to_million):
    N = 10**6
    report = run_sweep(SweepConfig(N, ["D"], ["chain-eq10"]))["chain-eq10"]
    assert report["violation_count"] == 0 and report["checked"] == 3 * (N - 1)
    odd_prime_powers = sum(1 for p in primes_to_million[1:] for k in range(2, 20) if p**k <= N)
    powers_of_two = sum(1 for k in range(2, 20) if 2**k <= N)
    classes = report["equality_classes"]["D"]
    assert classes["upper"] == classes["log"] == {"power_of_two": powers_of_two, "prime": 1}
    assert classes["lower"] == {"prime": len(primes_to_million), "power_of_two": powers_of_two,
                                "prime_power": odd_prime_powers}
    devs = {d["link"]: d for d in report["deviations"]}
    assert set(devs) == {"lower"}
    assert devs["lower"]["missing_count"] == 0
    assert devs["lower"]["unexpected_count"] == odd_prime_powers
    assert devs["lower"]["unexpected"][0] == 9


@pytest.mark.criterion("Westrick bound on [2, 10^6] with its equality set")
def test_westrick(primes_to_million):
    N = 10**6
    report = run_sweep(SweepConfig(N, ["D"], ["westrick-eq11"]))["westrick-eq11"]
    assert report["violation_count"] == 0 and report["checked"] == 2 * (N - 1)
    powers_of_two = sum(1 for k in range(2, 20) if 2**k <= N)
    two_tails = sum(1 for p in primes_to_million[1:] for a in range(1, 20) if 2**a * p <= N)
    classes = report["equality_classes"]["D"]
    assert classes["westrick"] == {"prime": len(primes_to_million), "power_of_two": powers_of_two,
                                   "two_smooth_tail": two_tails}
    assert classes["westrick-vs-upper"] == {"power_of_two": powers_of_two, "prime": 1}
    assert report["deviations"] == []


@pytest.mark.criterion("extended bounds: D matches classic, random spec holds, D_{2} at 6")
def test_extended_bounds():
    for n in range(2, 10**5 + 1):
        lower, upper, log = classic_bounds(n)
        ext_upper, ext_log = extended_upper(D, n)
        pairs = ((upper, ext_upper), (log, ext_log), (westrick_bound(n), extended_westrick(D, n)),
                 (lower, extended_lower(D, n)))
        for classic, ext in pairs:
            assert (classic.lhs, classic.rhs, classic.relation) == (ext.lhs, ext.rhs, ext.relation), n

    rng = random.Random(20240607)
    x = {p: Fraction(rng.randint(0, 10), rng.randint(1, 10)) for p in eratosthenes(10**4)}
    spec = LAdditiveSpec(PrimeMap(x, DefaultRule.const(0)), PrimeMap({}, DefaultRule.prime()), "random")
    props = ["extended-eq15", "extended-eq16", "extended-lower"]
    report = run_sweep(SweepConfig(10**4, [spec], props))
    for prop in props:
        assert report[prop]["violation_count"] == 0
        assert report[prop]["checked"] > 0

    ext_upper = extended_upper(D2, 6)[0]
    assert (ext_upper.lhs, ext_upper.rhs, ext_upper.relation) == (3, 3, EQUAL)
    w = extended_westrick(D2, 6)
    assert (w.lhs, w.rhs, w.relation, w.reason) == (3, 1, PRECONDITION, "s<r")
    d2 = run_sweep(SweepConfig(100, ["D_S=2"], ["extended-eq15"]))["extended-eq15"]
    upper_dev = next(d for d in d2["deviations"] if d["link"] == "ext-upper")
    assert 6 in upper_dev["unexpected"]


@pytest.mark.criterion("sweep report byte-identical for 1, 4 and 8 workers")
def test_worker_determinism():
    table = tabulate(D, 9000).replace(4, 3).replace(8, 5)
    sources = ["D", "D_S=2", "theta", "ld", ("corrupted", table)]
    texts = [report_json(run_sweep(SweepConfig(9000, sources, worker_count=w))) for w in (1, 4, 8)]
    assert texts[0] == texts[1] == texts[2]
