"""Exhaustive desk-scale sweeps over every quantified claim.

Work is cut into fixed-size n-ranges, so the report does not depend on how
many worker processes evaluate the chunks. Observed equality sets are compared
with the equality conditions stated for each bound; mismatches go to
``deviations``, which never count as violations.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from . import bounds
from .functions import (
    CAdditiveSpec,
    LAdditiveSpec,
    PrimeSet,
    SpecError,
    builtin,
    eval_c_multiplicative,
    eval_l_additive,
)
from .numeric import factorize, format_rational
from .reconstruction import (
    FunctionTable,
    ThetaError,
    check_conditions,
    companion_values,
    support_partition,
)

PROPERTIES = (
    "leibniz",
    "chain-eq10",
    "westrick-eq11",
    "extended-eq15",
    "extended-eq16",
    "extended-lower",
    "reconstruction-roundtrip",
    "conditions",
)

CHUNK = 4096
SAMPLE = 25


def definition_oracle_D(n: int, S: PrimeSet) -> int:
    """``n * sum(nu_p(n) / p for p in S)`` by plain repeated division."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    total = 0
    m, d = n, 2
    while d * d <= m:
        while m % d == 0:
            if d in S:
                total += n // d
            m //= d
        d += 1
    if m > 1 and m in S:
        total += n // m
    return total


# -- sources ------------------------------------------------------------------

@dataclass(frozen=True)
class Source:
    name: str
    spec: Optional[LAdditiveSpec] = None
    table: Optional[FunctionTable] = None
    prime_set: Optional[PrimeSet] = None  # set for D / D_S, enables the oracle cross-check


def parse_prime_set(text: str) -> PrimeSet:
    """``2,5`` is a finite set, ``^2,3`` all primes except those."""
    complement = text.startswith("^")
    body = text[1:] if complement else text
    try:
        primes = [int(t) for t in body.split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"bad prime list {text!r}") from None
    if not primes and not complement:
        raise SpecError("prime set must be non-empty")
    return PrimeSet.excluding(*primes) if complement else PrimeSet.of(*primes)


def builtin_source(token: str) -> Source:
    """``D``, ``theta``, ``ld``, ``D_S=2,5``, ``ld_S=^2`` and so on."""
    name, _, arg = token.partition("=")
    S = parse_prime_set(arg) if arg else None
    if name in ("N", "E"):
        raise SpecError(f"{name} is not Leibniz-additive with a nonzero f; nothing to sweep")
    spec = builtin(name, S)
    if isinstance(spec, CAdditiveSpec):
        spec = LAdditiveSpec.from_c_additive(spec, token)
    spec = LAdditiveSpec(spec.x, spec.y, token)
    pset = None
    if name == "D":
        pset = PrimeSet.all()
    elif name == "D_S":
        pset = S
    return Source(token, spec=spec, prime_set=pset)


def as_source(item) -> Source:
    if isinstance(item, Source):
        return item
    if isinstance(item, str):
        return builtin_source(item)
    if isinstance(item, LAdditiveSpec):
        return Source(item.name or "spec", spec=item)
    if isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], FunctionTable):
        return Source(item[0], table=item[1])
    raise TypeError(f"cannot sweep {item!r}")


@dataclass
class SweepConfig:
    max_n: int
    spec_list: Sequence[Union[str, LAdditiveSpec, Source, Tuple[str, FunctionTable]]]
    property_list: Sequence[str] = PROPERTIES
    worker_count: int = 1
    exponent_bound: int = 3

    def __post_init__(self):
        if self.max_n < 2:
            raise ValueError("max_n must be at least 2")
        if not self.property_list:
            raise ValueError("property_list must be non-empty")
        unknown = [p for p in self.property_list if p not in PROPERTIES]
        if unknown:
            raise ValueError(f"unknown properties: {', '.join(unknown)}")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")


# -- equality claims -----------------------------------------------------------

def _claim_prime_or_pow2(n: int, cls, ctx=None) -> bool:
    return cls.kind == "prime" or bounds.is_power_of_two(n)


def _claim_pow2(n: int, cls, ctx=None) -> bool:
    return bounds.is_power_of_two(n)


def _claim_westrick(n: int, cls, ctx=None) -> bool:
    return cls.kind in ("prime", "power_of_two", "two_smooth_tail")


def _claim_ext_westrick(n: int, cls, ctx: "bounds.BoundContext") -> bool:
    if ctx.r == 1:
        return True
    return all(p == 2 for p in ctx.p_list[:-1]) and ctx.h_2 == 2


CLAIMS: Dict[str, Tuple[str, Callable]] = {
    "lower": ("n is a prime or a power of 2", _claim_prime_or_pow2),
    "upper": ("n is a power of 2", _claim_pow2),
    "log": ("n is a power of 2", _claim_pow2),
    "westrick": ("n is prime or q_1 = ... = q_(r-1) = 2", _claim_westrick),
    "westrick-vs-upper": ("n = 2^r", _claim_pow2),
    "ext-upper": ("n is a power of 2", _claim_pow2),
    "ext-log": ("n is a power of 2", _claim_pow2),
    "ext-westrick": ("n is prime or p_1 = ... = p_(s-1) = 2 = h(2)", _claim_ext_westrick),
    "ext-lower": ("n is a prime or a power of 2", _claim_prime_or_pow2),
}


# -- chunk workers (module level so they pickle) ---------------------------------

def _empty_partial() -> dict:
    return {"checked": 0, "violations": [], "violation_count": 0,
            "preconditions": 0, "classes": {}, "dev": {}}


def _record(part: dict, n: int, verdict: "bounds.BoundVerdict", cls, ctx=None) -> None:
    name = verdict.name
    if verdict.relation == bounds.PRECONDITION:
        part["preconditions"] += 1
        return
    part["checked"] += 1
    if verdict.relation == bounds.VIOLATED:
        part["violation_count"] += 1
        if len(part["violations"]) < SAMPLE:
            part["violations"].append({"n": n, **verdict.to_json()})
        return
    equal = verdict.relation == bounds.EQUAL
    claimed = CLAIMS[name][1](n, cls, ctx)
    if equal:
        kinds = part["classes"].setdefault(name, {})
        kinds[cls.kind] = kinds.get(cls.kind, 0) + 1
    if equal != claimed:
        d = part["dev"].setdefault(name, {"unexpected": [], "unexpected_count": 0,
                                          "missing": [], "missing_count": 0})
        key = "unexpected" if equal else "missing"
        d[key + "_count"] += 1
        if len(d[key]) < SAMPLE:
            d[key].append(n)


def _chunk_classic(args) -> dict:
    prop, lo, hi = args
    part = _empty_partial()
    for n in range(lo, hi):
        fac = factorize(n)
        cls = bounds.classify_equality(n, fac)
        if prop == "chain-eq10":
            for v in bounds.classic_bounds(n, fac):
                _record(part, n, v, cls)
        else:
            _record(part, n, bounds.westrick_bound(n, fac), cls)
            _record(part, n, bounds.westrick_improvement(n, fac), cls)
    return part


def _chunk_extended(args) -> dict:
    prop, spec, lo, hi = args
    part = _empty_partial()
    for n in range(lo, hi):
        ctx = bounds.BoundContext.build(spec, n)
        cls = bounds.classify_equality(n)
        if prop == "extended-eq15":
            verdicts = bounds.extended_upper(spec, n)
        elif prop == "extended-eq16":
            verdicts = [bounds.extended_westrick(spec, n)]
        else:
            verdicts = [bounds.extended_lower(spec, n)]
        for v in verdicts:
            _record(part, n, v, cls, ctx)
    return part


def _chunk_tabulate(args) -> Tuple[List[Fraction], List[Fraction]]:
    spec, lo, hi = args
    return ([eval_l_additive(spec, n) for n in range(lo, hi)],
            [eval_c_multiplicative(spec.h, n) for n in range(lo, hi)])


def _chunk_oracle(args) -> List[int]:
    pset, lo, hi = args
    return [definition_oracle_D(n, pset) for n in range(lo, hi)]


def _ranges(lo: int, hi: int) -> List[Tuple[int, int]]:
    return [(a, min(a + CHUNK, hi)) for a in range(lo, hi, CHUNK)]


def _merge(parts: List[dict]) -> dict:
    out = _empty_partial()
    for part in parts:
        out["checked"] += part["checked"]
        out["preconditions"] += part["preconditions"]
        out["violation_count"] += part["violation_count"]
        out["violations"].extend(part["violations"])
        for link, kinds in part["classes"].items():
            tgt = out["classes"].setdefault(link, {})
            for k, c in kinds.items():
                tgt[k] = tgt.get(k, 0) + c
        for link, d in part["dev"].items():
            tgt = out["dev"].setdefault(link, {"unexpected": [], "unexpected_count": 0,
                                               "missing": [], "missing_count": 0})
            for key in ("unexpected", "missing"):
                tgt[key + "_count"] += d[key + "_count"]
                tgt[key].extend(d[key])
    out["violations"] = out["violations"][:SAMPLE]
    for d in out["dev"].values():
        d["unexpected"] = d["unexpected"][:SAMPLE]
        d["missing"] = d["missing"][:SAMPLE]
    return out


# -- the sweep -------------------------------------------------------------------

@dataclass
class _PropertyReport:
    checked: int = 0
    violations: List[dict] = field(default_factory=list)
    violation_count: int = 0
    preconditions: int = 0
    equality_classes: Dict[str, dict] = field(default_factory=dict)
    deviations: List[dict] = field(default_factory=list)
    skipped: List[dict] = field(default_factory=list)

    def absorb(self, source: str, merged: dict) -> None:
        self.checked += merged["checked"]
        self.violation_count += merged["violation_count"]
        self.preconditions += merged["preconditions"]
        self.violations.extend({"source": source, **v} for v in merged["violations"])
        if merged["classes"]:
            self.equality_classes[source] = {
                link: dict(sorted(k.items())) for link, k in sorted(merged["classes"].items())}
        for link, d in sorted(merged["dev"].items()):
            self.deviations.append({"source": source, "link": link, "claim": CLAIMS[link][0], **d})

    def violate(self, source: str, witness: dict) -> None:
        self.violation_count += 1
        if len(self.violations) < SAMPLE:
            self.violations.append({"source": source, **witness})

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "violation_count": self.violation_count,
            "precondition_violations": self.preconditions,
            "equality_classes": self.equality_classes,
            "deviations": self.deviations,
            "skipped": self.skipped,
            "passed": self.violation_count == 0,
        }


class _Runner:
    def __init__(self, config: SweepConfig):
        self.config = config
        self.N = config.max_n
        self._pool = None
        self._tables: Dict[str, Tuple[FunctionTable, Optional[List[Fraction]]]] = {}

    def map(self, fn, tasks):
        if self.config.worker_count == 1:
            return list(map(fn, tasks))
        if self._pool is None:
            self._pool = ProcessPoolExecutor(max_workers=self.config.worker_count)
        return list(self._pool.map(fn, tasks))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def table_of(self, src: Source) -> Tuple[FunctionTable, Optional[List[Fraction]]]:
        """``f`` on ``[1, N]`` and, for specs, ``h`` on the same range (index 0 unused)."""
        if src.name not in self._tables:
            if src.table is not None:
                vals = src.table.values[: self.N + 1]
                self._tables[src.name] = (FunctionTable(tuple(vals)), None)
            else:
                chunks = self.map(_chunk_tabulate, [(src.spec, a, b) for a, b in _ranges(1, self.N + 1)])
                f = [Fraction(0)] + [v for fc, _ in chunks for v in fc]
                h = [Fraction(1)] + [v for _, hc in chunks for v in hc]
                self._tables[src.name] = (FunctionTable(tuple(f)), h)
        return self._tables[src.name]


def run_sweep(config: SweepConfig) -> dict:
    """Run every requested property over every source; returns a JSON-ready dict."""
    sources = []
    errors = []
    for item in config.spec_list:
        try:
            sources.append(as_source(item))
        except (SpecError, TypeError, ValueError) as exc:
            errors.append({"source": str(item), "error": str(exc)})
    runner = _Runner(config)
    report: Dict[str, dict] = {}
    try:
        for prop in config.property_list:
            rep = _PropertyReport()
            if prop in ("chain-eq10", "westrick-eq11"):
                tasks = [(prop, a, b) for a, b in _ranges(2, config.max_n + 1)]
                rep.absorb("D", _merge(runner.map(_chunk_classic, tasks)))
            else:
                for src in sources:
                    _PROPERTY_RUNNERS[prop](runner, src, rep)
            report[prop] = rep.to_json()
    finally:
        runner.close()
    if errors:
        report["source-errors"] = errors
    return report


def _run_leibniz(runner: _Runner, src: Source, rep: _PropertyReport) -> None:
    N = runner.N
    table, h = runner.table_of(src)
    f = table.values
    if h is None:
        h = _table_companion(table)
        if h is None:
            rep.skipped.append({"source": src.name, "reason": "f vanishes at every prime; h undetermined"})
            return
    for m in range(1, math.isqrt(N) + 1):
        for k in range(m, N // m + 1):
            hm, hk = h[m], h[k]
            if hm is None or hk is None:
                continue
            rep.checked += 1
            if f[m * k] != f[m] * hk + f[k] * hm:
                rep.violate(src.name, {"m": m, "n": k, "f(mn)": format_rational(f[m * k]),
                                       "rhs": format_rational(f[m] * hk + f[k] * hm)})
    if src.prime_set is not None:
        oracle = runner.map(_chunk_oracle, [(src.prime_set, a, b) for a, b in _ranges(1, N + 1)])
        for n, d in enumerate((v for c in oracle for v in c), start=1):
            rep.checked += 1
            if f[n] != d:
                rep.violate(src.name, {"n": n, "f(n)": format_rational(f[n]), "oracle": d})


def _table_companion(table: FunctionTable) -> Optional[List[Optional[Fraction]]]:
    N = table.limit
    part = support_partition(table, max(N // 2, 1))
    if not part.u_primes:
        return None
    hp = companion_values(table, part)
    h: List[Optional[Fraction]] = [None] * (N + 1)
    h[1] = Fraction(1)
    for n in range(2, N + 1):
        p, _ = factorize(n)[0]
        rest = h[n // p]
        if p in hp and rest is not None:
            h[n] = hp[p] * rest
    return h


def _run_extended(prop: str):
    def run(runner: _Runner, src: Source, rep: _PropertyReport) -> None:
        if src.spec is None:
            rep.skipped.append({"source": src.name, "reason": "needs a spec, not a table"})
            return
        tasks = [(prop, src.spec, a, b) for a, b in _ranges(2, runner.N + 1)]
        rep.absorb(src.name, _merge(runner.map(_chunk_extended, tasks)))
    return run


def _run_roundtrip(runner: _Runner, src: Source, rep: _PropertyReport) -> None:
    N = runner.N
    table, _ = runner.table_of(src)
    part = support_partition(table, max(N // 2, 1))
    if not part.u_primes:
        rep.skipped.append({"source": src.name, "reason": "f vanishes at every prime; h undetermined"})
        return
    h = companion_values(table, part)
    if src.spec is not None:
        for p, v in h.items():
            rep.checked += 1
            if v != src.spec.y(p):
                rep.violate(src.name, {"p": p, "reconstructed_h": format_rational(v),
                                       "spec_h": format_rational(src.spec.y(p))})
    for p in part.v_primes:
        ratios = {q: table[p * q] / table[q] for q in part.u_primes if p * q <= N}
        if len(set(ratios.values())) > 1:
            rep.violate(src.name, {"p": p, "ratios": {str(q): format_rational(v)
                                                      for q, v in ratios.items()}})
        rep.checked += 1
    for n in range(1, N + 1):
        fac = factorize(n)
        if any(p not in h or h[p] == 0 for p, _ in fac):
            continue
        g = sum((e * table[p] / h[p] for p, e in fac), Fraction(0))
        hn = Fraction(1)
        for p, e in fac:
            hn *= h[p] ** e
        rep.checked += 1
        if g * hn != table[n]:
            rep.violate(src.name, {"n": n, "table": format_rational(table[n]),
                                   "rebuilt": format_rational(g * hn)})


def _run_conditions(runner: _Runner, src: Source, rep: _PropertyReport) -> None:
    table, _ = runner.table_of(src)
    bound = min(math.isqrt(runner.N), 100)
    report = check_conditions(table, runner.config.exponent_bound, bound)
    for name, v in report.verdicts.items():
        rep.checked += v.checked
        if v.status == "violated":
            rep.violate(src.name, {"condition": name, **v.witness})
    if all(v.status == "vacuous" for v in report.verdicts.values()):
        rep.skipped.append({"source": src.name, "reason": "all conditions vacuous"})


_PROPERTY_RUNNERS = {
    "leibniz": _run_leibniz,
    "extended-eq15": _run_extended("extended-eq15"),
    "extended-eq16": _run_extended("extended-eq16"),
    "extended-lower": _run_extended("extended-lower"),
    "reconstruction-roundtrip": _run_roundtrip,
    "conditions": _run_conditions,
}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def has_violations(report: dict) -> bool:
    return any(isinstance(v, dict) and v.get("violation_count", 0) for v in report.values())
