"""Recovering ``h_f`` from a tabulated ``f`` and testing Leibniz-additivity.

A table holds exact values ``f(1..N)``. From it we read off

* ``h(p) = f(p^2) / (2 f(p))`` where ``f(p) != 0``
* ``h(p) = f(p q) / f(q)`` where ``f(p) == 0``, ``q`` the smallest prime with
  ``f(q) != 0``

and check the necessary conditions on prime powers, and c-additivity of
``g = f / h``. Everything is exact but limited to ``[1, N]``; an accepted table
is Leibniz-additive on that range, nothing more.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .functions import (
    AnySpec,
    CAdditiveSpec,
    CMultiplicativeSpec,
    DefaultRule,
    LAdditiveSpec,
    PrimeMap,
    evaluate,
)
from .numeric import (
    SIEVE_LIMIT,
    factorize,
    format_rational,
    parse_rational,
    primes_up_to,
    smallest_prime_factors,
)


class ReconstructionError(ValueError):
    pass


class ThetaError(ReconstructionError):
    """``f`` vanishes at every prime considered; any ``h`` would do."""


class MissingDataError(ReconstructionError):
    pass


class ZeroCompanionError(ReconstructionError):
    pass


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class FunctionTable:
    """Exact values ``f(1), ..., f(limit)``; ``values[0]`` is unused."""

    values: Tuple[Fraction, ...]

    @classmethod
    def from_values(cls, values: Iterable) -> "FunctionTable":
        return cls((Fraction(0),) + tuple(Fraction(v) for v in values))

    @property
    def limit(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> Fraction:
        if not 1 <= n <= self.limit:
            raise MissingDataError(f"f({n}) is outside the table [1, {self.limit}]")
        return self.values[n]

    def has(self, n: int) -> bool:
        return 1 <= n <= self.limit

    def replace(self, n: int, value) -> "FunctionTable":
        vals = list(self.values)
        vals[n] = Fraction(value)
        return FunctionTable(tuple(vals))


class SpecView:
    """Table-shaped view of a spec, evaluated on demand.

    Lets the prime-power condition checks reach points far beyond any table one
    would materialize. Only item access is supported; there is no ``values``.
    """

    def __init__(self, spec: AnySpec, limit: int):
        self.spec = spec
        self.limit = limit
        self._cache: Dict[int, Fraction] = {}

    def __getitem__(self, n: int) -> Fraction:
        if not 1 <= n <= self.limit:
            raise MissingDataError(f"f({n}) is outside the view [1, {self.limit}]")
        if n not in self._cache:
            self._cache[n] = evaluate(self.spec, n)
        return self._cache[n]

    def has(self, n: int) -> bool:
        return 1 <= n <= self.limit


def tabulate(spec: AnySpec, limit: int) -> FunctionTable:
    return FunctionTable.from_values(evaluate(spec, n) for n in range(1, limit + 1))


def read_table(path) -> FunctionTable:
    """Read the ``n,f`` CSV format: header, then rows ``n = 1..N`` in order."""
    values: List[Fraction] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["n", "f"]:
            raise TableFormatError(f"{path}: header must be 'n,f', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise TableFormatError(f"{path}:{lineno}: expected 2 fields")
            expected = len(values) + 1
            try:
                n = int(row[0])
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: bad n {row[0]!r}") from None
            if n != expected:
                kind = "duplicate" if n < expected else "missing"
                raise TableFormatError(f"{path}:{lineno}: {kind} row, expected n={expected}, got {n}")
            try:
                values.append(parse_rational(row[1]))
            except ValueError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from None
    if not values:
        raise TableFormatError(f"{path}: empty table")
    return FunctionTable.from_values(values)


def write_table(table: FunctionTable, dest) -> None:
    """Write the ``n,f`` CSV format to a path or an open text file."""
    if hasattr(dest, "write"):
        _write_rows(table, dest)
        return
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _write_rows(table, fh)


def _write_rows(table: FunctionTable, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "f"])
    for n in range(1, table.limit + 1):
        w.writerow([n, format_rational(table.values[n])])


# -- U_f / V_f --------------------------------------------------------------

@dataclass(frozen=True)
class SupportPartition:
    u_primes: Tuple[int, ...]
    v_primes: Tuple[int, ...]

    @property
    def witness_q(self) -> Optional[int]:
        return self.u_primes[0] if self.u_primes else None


def support_partition(table: FunctionTable, prime_bound: int) -> SupportPartition:
    if prime_bound > table.limit:
        raise MissingDataError(f"prime bound {prime_bound} exceeds table limit {table.limit}")
    u, v = [], []
    for p in primes_up_to(prime_bound):
        (u if table[p] != 0 else v).append(p)
    return SupportPartition(tuple(u), tuple(v))


def reconstruct_h(table: FunctionTable, prime_bound: int) -> CMultiplicativeSpec:
    """``h_f`` at every prime up to ``prime_bound``, as overrides only."""
    part = support_partition(table, prime_bound)
    q = part.witness_q
    if q is None:
        raise ThetaError("f vanishes at every prime up to the bound; h_f is not determined")
    h: Dict[int, Fraction] = {}
    for p in part.u_primes:
        h[p] = table[p * p] / (2 * table[p])
    for p in part.v_primes:
        h[p] = table[p * q] / table[q]
    zeros = [p for p, v in h.items() if v == 0]
    if zeros:
        raise ZeroCompanionError(f"reconstructed h vanishes at p={zeros[0]}")
    return CMultiplicativeSpec(PrimeMap(h, None))


def witness_ratios(table: FunctionTable, p: int, prime_bound: int) -> Dict[int, Fraction]:
    """``f(p q) / f(q)`` for every usable ``q`` in ``U_f``; all equal if ``f`` is L-additive."""
    part = support_partition(table, prime_bound)
    return {q: table[p * q] / table[q] for q in part.u_primes if table.has(p * q)}


def decompose(spec: LAdditiveSpec) -> Tuple[CAdditiveSpec, CMultiplicativeSpec]:
    """Split ``f = g h`` with ``g(p) = f(p) / h_f(p)`` and ``h = h_f``."""
    keys = set(spec.x.overrides) | set(spec.y.overrides)
    g_over = {p: spec.x(p) / spec.y(p) for p in keys}
    dx, dy = spec.x.default, spec.y.default
    g_default = None
    if dx is not None and dy is not None:
        g_default = DefaultRule(dx.coeff / dy.coeff, dx.power - dy.power)
    return CAdditiveSpec(PrimeMap(g_over, g_default)), CMultiplicativeSpec(spec.y)


# -- conditions -------------------------------------------------------------

CONDITIONS = ("i", "ii", "iii", "iv", "g-additive")


@dataclass
class ConditionVerdict:
    status: str = "vacuous"  # "holds" | "violated" | "vacuous"
    checked: int = 0
    skipped: int = 0
    witness: Optional[dict] = None
    note: str = ""

    def _hit(self, ok: bool, witness: dict) -> bool:
        """Record one instance; returns False once violated."""
        self.checked += 1
        if not ok:
            self.status = "violated"
            self.witness = witness
            return False
        self.status = "holds"
        return True

    def to_json(self) -> dict:
        out = {"status": self.status, "checked": self.checked, "skipped": self.skipped}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ConditionReport:
    verdicts: Dict[str, ConditionVerdict] = field(
        default_factory=lambda: {c: ConditionVerdict() for c in CONDITIONS})

    def __getitem__(self, name: str) -> ConditionVerdict:
        return self.verdicts[name]

    def violated(self) -> List[str]:
        return [c for c, v in self.verdicts.items() if v.status == "violated"]

    def to_json(self) -> dict:
        return {c: v.to_json() for c, v in self.verdicts.items()}


def check_conditions(table: FunctionTable, exponent_bound: int = 3,
                     prime_bound: Optional[int] = None,
                     additivity: bool = True) -> ConditionReport:
    """Check the four prime-power conditions, and optionally c-additivity of f/h.

    Instances that reference points beyond the table are counted as skipped.
    """
    N = table.limit
    if prime_bound is None:
        prime_bound = math.isqrt(N)
    part = support_partition(table, min(prime_bound, N))
    report = ConditionReport()
    B = exponent_bound
    U = part.u_primes

    _check_i(table, part, B, report["i"])
    if len(U) >= 2:
        _check_ii(table, part, B, report["ii"])
    _check_iii(table, part, report["iii"])
    _check_iv(table, part, report["iv"])

    if additivity and U:
        _check_g_additive(table, part, report["g-additive"])
    elif not additivity:
        report["g-additive"].note = "not requested"
    return report


def _check_i(table: FunctionTable, part: SupportPartition, B: int,
             verdict: ConditionVerdict) -> None:
    N, f = table.limit, table.__getitem__
    for p in part.u_primes:
        for a in range(B + 1):
            for b in range(B + 1):
                if p ** (max(a, b) + 1) > N:
                    verdict.skipped += 1
                    continue
                lhs = (f(p ** (a + 1)) / ((a + 1) * f(p))) ** b
                rhs = (f(p ** (b + 1)) / ((b + 1) * f(p))) ** a
                if not verdict._hit(lhs == rhs, {"p": p, "a": a, "b": b}):
                    return


def _check_ii(table: FunctionTable, part: SupportPartition, B: int,
              verdict: ConditionVerdict) -> None:
    N, f = table.limit, table.__getitem__
    for p in part.u_primes:
        for q in part.u_primes:
            if p == q:
                continue
            for a in range(B + 1):
                for b in range(B + 1):
                    pa, qb = p**a, q**b
                    if pa * qb > N or pa * p > N or qb * q > N:
                        verdict.skipped += 1
                        continue
                    rhs = (f(pa) * f(qb * q) / ((b + 1) * f(q))
                           + f(qb) * f(pa * p) / ((a + 1) * f(p)))
                    if not verdict._hit(f(pa * qb) == rhs, {"p": p, "q": q, "a": a, "b": b}):
                        return


def _check_iii(table: FunctionTable, part: SupportPartition, verdict: ConditionVerdict) -> None:
    # Equal ratios are transitive, so each q is compared against the first usable
    # one; q1 == q2 is kept since it still demands f(p q) != 0.
    N, f = table.limit, table.__getitem__
    nu = len(part.u_primes)
    for p in part.v_primes:
        usable = [q for q in part.u_primes if p * q <= N]
        verdict.skipped += nu * nu - len(usable) ** 2
        if not usable:
            continue
        q0 = usable[0]
        ref = f(p * q0)
        for q in usable:
            a = f(p * q)
            ok = ref != 0 and a != 0 and a * f(q0) == ref * f(q)
            if not ok:
                verdict._hit(False, {"p": p, "q1": q0, "q2": q})
                return
        verdict._hit(True, {})
        verdict.checked += len(usable) ** 2 - 1


def _check_iv(table: FunctionTable, part: SupportPartition, verdict: ConditionVerdict) -> None:
    for p in part.u_primes:
        if p * p > table.limit:
            verdict.skipped += 1
            continue
        if not verdict._hit(table[p * p] != 0, {"p": p}):
            return


def companion_values(table: FunctionTable, part: SupportPartition) -> Dict[int, Fraction]:
    """Best-effort ``h`` at the partitioned primes.

    Where ``f(p^2)`` lies beyond the table for ``p`` in ``U_f``, ``h(p)`` is
    solved from ``f(p q) = f(p) h(q) + f(q) h(p)``. Primes with no usable data
    are left out. Zero values are kept so callers can report them.
    """
    N, f = table.limit, table.__getitem__
    q = part.witness_q
    h: Dict[int, Fraction] = {}
    if q is None:
        return h
    if q * q <= N:
        h[q] = f(q * q) / (2 * f(q))
    for p in part.u_primes[1:]:
        if p * p <= N:
            h[p] = f(p * p) / (2 * f(p))
        elif p * q <= N and q in h:
            h[p] = (f(p * q) - f(p) * h[q]) / f(q)
    for p in part.v_primes:
        if p * q <= N:
            h[p] = f(p * q) / f(q)
    return h


def _g_table(table: FunctionTable, h: Dict[int, Fraction]) -> List[Optional[Fraction]]:
    """``g(n) = f(n) / h(n)`` wherever every prime of ``n`` has a known nonzero ``h``."""
    N = table.limit
    spf = smallest_prime_factors() if N <= SIEVE_LIMIT else smallest_prime_factors(N)
    hn: List[Optional[Fraction]] = [None] * (N + 1)
    hn[1] = Fraction(1)
    for n in range(2, N + 1):
        p = spf[n]
        hp, rest = h.get(p), hn[n // p]
        if hp is not None and hp != 0 and rest is not None:
            hn[n] = hp * rest
    return [None] + [table.values[n] / hn[n] if hn[n] is not None else None
                     for n in range(1, N + 1)]


def _g_pairs(N: int) -> Iterator[Tuple[int, int]]:
    """Pairs ``2 <= m <= n`` with ``m n <= N``.

    Powers of a single prime come first, so a broken prime-power tower is
    reported as such rather than through some mixed product.
    """
    for p in primes_up_to(math.isqrt(N)):
        powers = [p]
        while powers[-1] * p <= N:
            powers.append(powers[-1] * p)
        for i, m in enumerate(powers):
            for k in powers[i:]:
                if m * k > N:
                    break
                yield m, k
    for m in range(2, math.isqrt(N) + 1):
        for k in range(m, N // m + 1):
            if _same_prime_powers(m, k):
                continue
            yield m, k


def _same_prime_powers(m: int, k: int) -> bool:
    # both are powers of one prime p iff the larger is a power of the smaller's radical
    fm = factorize(m)
    if len(fm) != 1:
        return False
    p = fm[0][0]
    while k % p == 0:
        k //= p
    return k == 1


def _check_g_additive(table: FunctionTable, part: SupportPartition,
                      verdict: ConditionVerdict) -> List[Optional[Fraction]]:
    N = table.limit
    h = companion_values(table, part)
    g = _g_table(table, h)
    verdict.note = f"range-limited: pairs m, n >= 2 with m n <= {N}"
    if not verdict._hit(table.values[1] == 0, {"m": 1, "n": 1}):
        return g
    for m, k in _g_pairs(N):
        gm, gk, gmk = g[m], g[k], g[m * k]
        if gm is None or gk is None or gmk is None:
            verdict.skipped += 1
            continue
        if not verdict._hit(gmk == gm + gk, {"m": m, "n": k}):
            return g
    return g


@dataclass
class LAdditivityResult:
    """Outcome of :func:`check_l_additive`; ``h``/``g`` are filled when accepted."""

    accepted: bool
    report: ConditionReport
    h: Dict[int, Fraction] = field(default_factory=dict)
    g: Dict[int, Fraction] = field(default_factory=dict)
    reason: str = ""

    def describe(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected: {self.reason}"


def check_l_additive(table: FunctionTable, prime_bound: Optional[int] = None) -> LAdditivityResult:
    """Decide Leibniz-additivity of ``table`` on ``[1, N]``.

    Needs only the zero-ratio and square conditions plus c-additivity of
    ``f / h``; the other two prime-power conditions are not consulted.
    """
    N = table.limit
    if prime_bound is None:
        prime_bound = max(N // 2, 1)
    part = support_partition(table, min(prime_bound, N))
    if not part.u_primes:
        raise ThetaError("f vanishes at every prime up to the bound; h_f is not determined")
    report = ConditionReport()
    _check_iii(table, part, report["iii"])
    _check_iv(table, part, report["iv"])
    for name in ("iii", "iv"):
        v = report[name]
        if v.status == "violated":
            return LAdditivityResult(False, report, reason=_describe_condition(name, v.witness))

    h = companion_values(table, part)
    for p, v in h.items():
        if v == 0:
            return LAdditivityResult(False, report, reason=f"h({p}) = 0")

    verdict = report["g-additive"]
    g = _check_g_additive(table, part, verdict)
    if verdict.status == "violated":
        m, k = verdict.witness["m"], verdict.witness["n"]
        return LAdditivityResult(False, report, reason=f"g({m * k}) ≠ g({m})+g({k})")
    return LAdditivityResult(
        True, report,
        h=dict(sorted(h.items())),
        g={p: g[p] for p in sorted(h) if g[p] is not None},
    )


def _describe_condition(name: str, w: dict) -> str:
    if name == "iv":
        return f"f({w['p']}^2) = 0 with f({w['p']}) ≠ 0"
    p, q1, q2 = w["p"], w["q1"], w["q2"]
    return f"f({p * q1})/f({p * q2}) ≠ f({q1})/f({q2}) or a zero ratio (p={p})"
