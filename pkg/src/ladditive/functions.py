"""Prime-indexed generative descriptions of arithmetic functions.

A completely additive ``g``, a completely multiplicative ``h`` and a
Leibniz-additive ``f`` are each fixed by finitely many numbers once their
values at primes are known::

    g(n) = sum(e * x[p])
    h(n) = prod(y[p] ** e)
    f(n) = sum(e * x[p] / y[p]) * h(n)

where ``n = prod(p ** e)``. Infinite sequences ``x``/``y`` are stored as a
:class:`PrimeMap`: a finite table of overrides plus a :class:`DefaultRule`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Mapping, Optional, Union

from .numeric import factorize, format_rational, is_prime, parse_rational


class SpecError(ValueError):
    """Invalid function specification or spec document."""


@dataclass(frozen=True)
class PrimeSet:
    """A set of primes: all of them, a finite set, or all but a finite set."""

    kind: str  # "all" | "finite" | "complement"
    members: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.kind not in ("all", "finite", "complement"):
            raise SpecError(f"unknown prime-set kind {self.kind!r}")
        members = frozenset(int(p) for p in self.members)
        bad = sorted(p for p in members if not is_prime(p))
        if bad:
            raise SpecError(f"not prime: {', '.join(map(str, bad))}")
        if self.kind == "all" and members:
            raise SpecError("the set of all primes takes no members")
        object.__setattr__(self, "members", members)

    @classmethod
    def all(cls) -> "PrimeSet":
        return cls("all")

    @classmethod
    def of(cls, *primes: int) -> "PrimeSet":
        return cls("finite", frozenset(primes))

    @classmethod
    def excluding(cls, *primes: int) -> "PrimeSet":
        return cls("complement", frozenset(primes))

    def __contains__(self, p: int) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "finite":
            return p in self.members
        return p not in self.members

    def is_empty(self) -> bool:
        return self.kind == "finite" and not self.members

    def require_nonempty(self) -> "PrimeSet":
        if self.is_empty():
            raise SpecError("prime set must be non-empty")
        return self

    def label(self) -> str:
        if self.kind == "all":
            return "P"
        body = ",".join(map(str, sorted(self.members)))
        return "{%s}" % body if self.kind == "finite" else "P\\{%s}" % body


@dataclass(frozen=True)
class DefaultRule:
    """Value at a prime without an override: ``coeff * p ** power``.

    The three named shapes are constants (``power == 0``), the prime itself
    and its reciprocal. Other (coeff, power) pairs arise from decomposing.
    """

    coeff: Fraction
    power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "power", int(self.power))

    @classmethod
    def const(cls, value) -> "DefaultRule":
        return cls(Fraction(value), 0)

    @classmethod
    def prime(cls) -> "DefaultRule":
        return cls(Fraction(1), 1)

    @classmethod
    def reciprocal_prime(cls) -> "DefaultRule":
        return cls(Fraction(1), -1)

    def __call__(self, p: int) -> Fraction:
        if self.power == 0 or self.coeff == 0:
            return self.coeff
        return self.coeff * Fraction(p) ** self.power

    def is_zero(self) -> bool:
        return self.coeff == 0

    def kind(self) -> str:
        if self.power == 0 or self.coeff == 0:
            return "const"
        if self.coeff == 1 and self.power == 1:
            return "prime"
        if self.coeff == 1 and self.power == -1:
            return "reciprocal-prime"
        return "scaled-power"


@dataclass(frozen=True)
class PrimeMap:
    """``p -> overrides[p]`` if present, else ``default(p)``.

    ``default=None`` gives a partial map (e.g. a reconstructed ``h`` known only
    on finitely many primes); looking up a missing prime raises ``KeyError``.
    """

    overrides: Mapping[int, Fraction] = field(default_factory=dict)
    default: Optional[DefaultRule] = None

    def __post_init__(self):
        clean: Dict[int, Fraction] = {}
        for p, v in self.overrides.items():
            p = int(p)
            if not is_prime(p):
                raise SpecError(f"override key {p} is not prime")
            clean[p] = Fraction(v)
        object.__setattr__(self, "overrides", dict(sorted(clean.items())))
        object.__setattr__(self, "_memo", {})

    def __call__(self, p: int) -> Fraction:
        try:
            return self.overrides[p]
        except KeyError:
            if self.default is None:
                raise KeyError(f"no value at prime {p}") from None
            return self.default(p)

    def raw(self, p: int) -> Union[int, Fraction]:
        """Memoized lookup, integral values as plain ``int`` for speed."""
        memo = self._memo
        try:
            return memo[p]
        except KeyError:
            v = self(p)
            v = v.numerator if v.denominator == 1 else v
            if len(memo) < 1 << 16:
                memo[p] = v
            return v

    def __getstate__(self):
        return {"overrides": self.overrides, "default": self.default}

    def __setstate__(self, state):
        object.__setattr__(self, "overrides", state["overrides"])
        object.__setattr__(self, "default", state["default"])
        object.__setattr__(self, "_memo", {})

    def __hash__(self):
        return hash((tuple(self.overrides.items()), self.default))

    def has_zero(self) -> bool:
        return (any(v == 0 for v in self.overrides.values())
                or (self.default is not None and self.default.is_zero()))

    def is_nonnegative(self) -> bool:
        return (all(v >= 0 for v in self.overrides.values())
                and (self.default is None or self.default.coeff >= 0))


@dataclass(frozen=True)
class CAdditiveSpec:
    x: PrimeMap


@dataclass(frozen=True)
class CMultiplicativeSpec:
    y: PrimeMap

    def __post_init__(self):
        if self.y.has_zero():
            raise SpecError("a completely multiplicative spec must be nonzero at every prime")


@dataclass(frozen=True)
class LAdditiveSpec:
    """``f`` at primes (``x``) together with its companion ``h_f`` at primes (``y``)."""

    x: PrimeMap
    y: PrimeMap
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.y.has_zero():
            raise SpecError("h_f must be nonzero at every prime")

    @classmethod
    def from_c_additive(cls, spec: CAdditiveSpec, name: str = "") -> "LAdditiveSpec":
        """View a completely additive function as Leibniz-additive with ``h = E``."""
        return cls(spec.x, PrimeMap({}, DefaultRule.const(1)), name)

    @property
    def h(self) -> CMultiplicativeSpec:
        return CMultiplicativeSpec(self.y)


AnySpec = Union[CAdditiveSpec, CMultiplicativeSpec, LAdditiveSpec]


def eval_c_additive(spec: CAdditiveSpec, n: int) -> Fraction:
    x = spec.x.raw
    return Fraction(sum(e * x(p) for p, e in factorize(n)))


def eval_c_multiplicative(spec: CMultiplicativeSpec, n: int) -> Fraction:
    y = spec.y.raw
    out = 1
    for p, e in factorize(n):
        out *= y(p) ** e
    return Fraction(out)


def eval_l_additive(spec: LAdditiveSpec, n: int) -> Fraction:
    # sum(e x_p / y_p) * prod(y_p^e), with the division folded into h / y_p
    x, y = spec.x.raw, spec.y.raw
    fac = factorize(n)
    h = 1
    for p, e in fac:
        h *= y(p) ** e
    total = 0
    for p, e in fac:
        xp = x(p)
        if xp:
            yp = y(p)
            rest = h // yp if type(h) is int and type(yp) is int else h / yp
            total += e * xp * rest
    return Fraction(total)


def eval_prime_power(spec: LAdditiveSpec, p: int, a: int) -> Fraction:
    """``f(p**a) = a * f(p) * h(p)**(a-1)``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a < 1:
        raise ValueError(f"exponent must be positive, got {a}")
    return a * spec.x(p) * spec.y(p) ** (a - 1)


def evaluate(spec: AnySpec, n: int) -> Fraction:
    if isinstance(spec, LAdditiveSpec):
        return eval_l_additive(spec, n)
    if isinstance(spec, CAdditiveSpec):
        return eval_c_additive(spec, n)
    return eval_c_multiplicative(spec, n)


BUILTIN_NAMES = ("D", "D_S", "ld", "ld_S", "N", "E", "theta")


def builtin(name: str, S: Optional[PrimeSet] = None) -> AnySpec:
    """Named functions: D, D_S, ld, ld_S, N, E and theta."""
    if name in ("D_S", "ld_S"):
        if S is None:
            raise SpecError(f"{name} needs a prime set")
        S.require_nonempty()
    elif name in ("D", "ld"):
        S = PrimeSet.all()
    elif name not in BUILTIN_NAMES:
        raise SpecError(f"unknown builtin {name!r}")

    if name in ("D", "D_S"):
        return LAdditiveSpec(_indicator(S, DefaultRule.const(1)),
                             PrimeMap({}, DefaultRule.prime()),
                             name="D" if name == "D" else f"D_{S.label()}")
    if name in ("ld", "ld_S"):
        return CAdditiveSpec(_indicator(S, DefaultRule.reciprocal_prime()))
    if name == "N":
        return CMultiplicativeSpec(PrimeMap({}, DefaultRule.prime()))
    if name == "E":
        return CMultiplicativeSpec(PrimeMap({}, DefaultRule.const(1)))
    return LAdditiveSpec(PrimeMap({}, DefaultRule.const(0)),
                         PrimeMap({}, DefaultRule.const(1)), name="theta")


def _indicator(S: PrimeSet, on: DefaultRule) -> PrimeMap:
    """``on(p)`` for p in S, 0 elsewhere."""
    if S.kind == "all":
        return PrimeMap({}, on)
    if S.kind == "finite":
        return PrimeMap({p: on(p) for p in S.members}, DefaultRule.const(0))
    return PrimeMap({p: 0 for p in S.members}, on)


# -- JSON documents ---------------------------------------------------------

_DEFAULT_KINDS = ("const", "prime", "reciprocal-prime", "scaled-power")


def prime_map_to_json(pm: PrimeMap) -> dict:
    doc = {"overrides": {str(p): format_rational(v) for p, v in pm.overrides.items()}}
    if pm.default is not None:
        kind = pm.default.kind()
        d = {"kind": kind}
        if kind in ("const", "scaled-power"):
            d["value"] = format_rational(pm.default.coeff)
        if kind == "scaled-power":
            d["power"] = pm.default.power
        doc["default"] = d
    return doc


def prime_map_from_json(doc) -> PrimeMap:
    if not isinstance(doc, dict):
        raise SpecError("prime map must be an object")
    _reject_unknown(doc, {"overrides", "default"}, "prime map")
    raw = doc.get("overrides", {})
    if not isinstance(raw, dict):
        raise SpecError("overrides must be an object")
    overrides = {}
    for key, val in raw.items():
        if not key.isdigit() or key != str(int(key)):
            raise SpecError(f"override key {key!r} is not a canonical integer")
        overrides[int(key)] = _rational(val)
    default = None
    if "default" in doc:
        default = _default_from_json(doc["default"])
    return PrimeMap(overrides, default)


def _default_from_json(d) -> DefaultRule:
    if not isinstance(d, dict):
        raise SpecError("default must be an object")
    kind = d.get("kind")
    if kind not in _DEFAULT_KINDS:
        raise SpecError(f"unknown default kind {kind!r}")
    allowed = {"kind"}
    if kind in ("const", "scaled-power"):
        allowed.add("value")
        if "value" not in d:
            raise SpecError(f"default kind {kind!r} needs a value")
    if kind == "scaled-power":
        allowed.add("power")
        if not isinstance(d.get("power"), int) or isinstance(d.get("power"), bool):
            raise SpecError("scaled-power default needs an integer power")
    _reject_unknown(d, allowed, "default")
    if kind == "const":
        return DefaultRule.const(_rational(d["value"]))
    if kind == "prime":
        return DefaultRule.prime()
    if kind == "reciprocal-prime":
        return DefaultRule.reciprocal_prime()
    return DefaultRule(_rational(d["value"]), d["power"])


def spec_to_json(spec: LAdditiveSpec) -> dict:
    return {"x": prime_map_to_json(spec.x), "y": prime_map_to_json(spec.y)}


def spec_from_json(doc, name: str = "") -> LAdditiveSpec:
    if not isinstance(doc, dict):
        raise SpecError("spec document must be an object")
    _reject_unknown(doc, {"x", "y"}, "spec")
    for key in ("x", "y"):
        if key not in doc:
            raise SpecError(f"spec document lacks {key!r}")
    return LAdditiveSpec(prime_map_from_json(doc["x"]), prime_map_from_json(doc["y"]), name)


def load_spec(path, name: Optional[str] = None) -> LAdditiveSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc})") from None
    return spec_from_json(doc, name if name is not None else str(path))


def _rational(val) -> Fraction:
    try:
        return parse_rational(val)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def _reject_unknown(doc: dict, allowed, what: str) -> None:
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise SpecError(f"unknown key(s) in {what}: {', '.join(extra)}")
