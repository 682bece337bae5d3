"""Exact checks of the upper and lower bounds for D(n) and Leibniz-additive f(n).

No irrational quantity is ever formed. ``r n^((r-1)/r) <= D(n)`` is compared
as ``r^r n^(r-1) <= D(n)^r`` and ``r <= log2 n`` as ``2^r <= n``; everything
else is a plain rational comparison. Every verdict reads ``lhs <= rhs``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

from .functions import LAdditiveSpec
from .numeric import Factorization, factorize, format_rational

STRICT = "strict"
EQUAL = "equal"
VIOLATED = "violated"
PRECONDITION = "precondition-violated"


@dataclass(frozen=True)
class BoundVerdict:
    name: str
    lhs: Union[int, Fraction]
    rhs: Union[int, Fraction]
    relation: str
    reason: str = ""

    @property
    def label(self) -> str:
        if self.relation == PRECONDITION:
            return f"{PRECONDITION}({self.reason})"
        return self.relation

    @property
    def holds(self) -> bool:
        return self.relation in (STRICT, EQUAL)

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": format_rational(self.lhs),
                "rhs": format_rational(self.rhs), "relation": self.label}


def _half(x) -> Union[int, Fraction]:
    if type(x) is int:
        return x // 2 if x % 2 == 0 else Fraction(x, 2)
    return x / 2


def _compare(name: str, lhs, rhs, reasons: Tuple[str, ...] = ()) -> BoundVerdict:
    if reasons:
        return BoundVerdict(name, lhs, rhs, PRECONDITION, ",".join(reasons))
    if lhs < rhs:
        rel = STRICT
    elif lhs == rhs:
        rel = EQUAL
    else:
        rel = VIOLATED
    return BoundVerdict(name, lhs, rhs, rel)


def _factor_n(n: int) -> Factorization:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"expected an integer, got {type(n).__name__}")
    if n < 2:
        raise ValueError(f"bounds need n >= 2, got {n}")
    return factorize(n)


def _derivative(n: int, fac: Factorization) -> int:
    return sum(e * (n // p) for p, e in fac)


def classic_bounds(n: int, fac: Optional[Factorization] = None) -> List[BoundVerdict]:
    """The chain ``r n^((r-1)/r) <= D(n) <= r n / 2 <= n log2(n) / 2``."""
    fac = fac if fac is not None else _factor_n(n)
    r = fac.omega()
    d = _derivative(n, fac)
    return [
        _compare("lower", r**r * n ** (r - 1), d**r),
        _compare("upper", d, _half(r * n)),
        _compare("log", 2**r, n),
    ]


def westrick_bound(n: int, fac: Optional[Factorization] = None) -> BoundVerdict:
    """``D(n) <= (r-1) n / 2 + 2^(r-1)``."""
    fac = fac if fac is not None else _factor_n(n)
    r = fac.omega()
    return _compare("westrick", _derivative(n, fac), _half((r - 1) * n + 2**r))


def westrick_improvement(n: int, fac: Optional[Factorization] = None) -> BoundVerdict:
    """The Westrick bound never exceeds ``r n / 2``."""
    fac = fac if fac is not None else _factor_n(n)
    r = fac.omega()
    return _compare("westrick-vs-upper", _half((r - 1) * n + 2**r), _half(r * n))


@dataclass(frozen=True)
class BoundContext:
    """Everything the extended bounds need about ``f`` at ``n``."""

    n: int
    q_list: Tuple[int, ...]
    r: int
    s: int
    p_list: Tuple[int, ...]
    M: Union[int, Fraction]
    m: Union[int, Fraction]
    f_n: Union[int, Fraction]
    h_n: Union[int, Fraction]
    h_2: Union[int, Fraction]

    @classmethod
    def build(cls, spec: LAdditiveSpec, n: int) -> "BoundContext":
        fac = _factor_n(n)
        x, y = spec.x.raw, spec.y.raw
        q_list = tuple(p for p, e in fac for _ in range(e))
        xs = {p: x(p) for p, _ in fac}
        h = 1
        for p, e in fac:
            h *= y(p) ** e
        f = 0
        for p, e in fac:
            if xs[p]:
                yp = y(p)
                f += e * xs[p] * (h // yp if type(h) is int and type(yp) is int else h / yp)
        p_list = tuple(q for q in q_list if xs[q] != 0)
        return cls(n=n, q_list=q_list, r=len(q_list), s=len(p_list), p_list=p_list,
                   M=max(xs.values()), m=min(xs.values()), f_n=f, h_n=h, h_2=y(2))

    def upper_reasons(self, spec: LAdditiveSpec) -> Tuple[str, ...]:
        reasons = []
        x, y = spec.x.raw, spec.y.raw
        primes = set(self.q_list)
        if any(x(p) < 0 for p in primes):
            reasons.append("f(p)<0")
        if any(y(p) < p for p in set(self.p_list)):
            reasons.append("h(p)<p")
        if self.h_n <= 0:
            reasons.append("h(n)<=0")
        return tuple(reasons)


def extended_upper(spec: LAdditiveSpec, n: int) -> List[BoundVerdict]:
    """``f(n) <= s M h(n) / 2 <= M log2(n) h(n) / 2`` under ``h(p) >= p`` on ``U_f``."""
    ctx = BoundContext.build(spec, n)
    reasons = ctx.upper_reasons(spec)
    return [
        _compare("ext-upper", ctx.f_n, _half(ctx.s * ctx.M * ctx.h_n), reasons),
        _compare("ext-log", 2**ctx.s, n, reasons),
    ]


def extended_westrick(spec: LAdditiveSpec, n: int) -> BoundVerdict:
    """``f(n) <= ((s-1)/2 h(n) + h(2)^(s-1)) M``, only claimed when every prime of n is in U_f."""
    ctx = BoundContext.build(spec, n)
    reasons = ctx.upper_reasons(spec)
    if ctx.s < ctx.r:
        reasons += ("s<r",)
    rhs = (_half((ctx.s - 1) * ctx.h_n) + ctx.h_2 ** (ctx.s - 1)) * ctx.M
    return _compare("ext-westrick", ctx.f_n, rhs, reasons)


def extended_lower(spec: LAdditiveSpec, n: int) -> BoundVerdict:
    """``r m h(n)^((r-1)/r) <= f(n)``, compared after raising both sides to the r-th power."""
    ctx = BoundContext.build(spec, n)
    reasons = []
    primes = set(ctx.q_list)
    if any(spec.x.raw(p) < 0 for p in primes):
        reasons.append("f(p)<0")
    if any(spec.y.raw(p) <= 0 for p in primes):
        reasons.append("h(p)<=0")
    r = ctx.r
    return _compare("ext-lower", r**r * ctx.m**r * ctx.h_n ** (r - 1), ctx.f_n**r, tuple(reasons))


class EqualityClass(NamedTuple):
    kind: str  # prime | power_of_two | prime_power | two_smooth_tail | other
    p: Optional[int] = None
    k: Optional[int] = None


def classify_equality(n: int, fac: Optional[Factorization] = None) -> EqualityClass:
    fac = fac if fac is not None else _factor_n(n)
    if len(fac) == 1:
        p, k = fac[0]
        if k == 1:
            return EqualityClass("prime", p, 1)
        if p == 2:
            return EqualityClass("power_of_two", 2, k)
        return EqualityClass("prime_power", p, k)
    if len(fac) == 2 and fac[0][0] == 2 and fac[1][1] == 1:
        return EqualityClass("two_smooth_tail")
    return EqualityClass("other")


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0
