"""Command-line front end.

Exit codes: 0 success / holds, 1 a property was rejected or violated,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import bounds
from .functions import PrimeSet, SpecError, load_spec, prime_map_to_json, evaluate
from .numeric import factorize, format_rational
from .reconstruction import (
    MissingDataError,
    ReconstructionError,
    TableFormatError,
    ThetaError,
    ZeroCompanionError,
    check_conditions,
    check_l_additive,
    decompose,
    read_table,
    reconstruct_h,
    tabulate,
    write_table,
)
from .subderivative import log_subderivative, subderivative
from .sweep import PROPERTIES, SweepConfig, builtin_source, has_violations, report_json, run_sweep


class UsageError(Exception):
    pass


def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _prime_list(text: str):
    try:
        primes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    return primes


def _add_prime_set_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true", help="all primes (default)")
    g.add_argument("--set", type=_prime_list, metavar="P1,P2,...", help="a finite set of primes")
    g.add_argument("--complement", type=_prime_list, metavar="P1,P2,...",
                   help="all primes except these")


def _prime_set(args) -> PrimeSet:
    if args.set is not None:
        if not args.set:
            raise UsageError("--set needs at least one prime")
        return PrimeSet.of(*args.set)
    if args.complement is not None:
        return PrimeSet.excluding(*args.complement)
    return PrimeSet.all()


def _add_spec_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--spec", dest="specfile", metavar="FILE", help="function-spec JSON document")
    g.add_argument("--builtin", metavar="NAME",
                   help="D, theta, ld, D_S=2,5, ld_S=^2 (^ means all primes except)")


def _spec(args):
    if args.specfile:
        return load_spec(args.specfile)
    if args.builtin:
        return builtin_source(args.builtin).spec
    return None


def _value(v, as_float: bool) -> str:
    s = format_rational(v)
    if as_float:
        s += f"\t{float(Fraction(v)):.12g}"
    return s


# -- commands --------------------------------------------------------------------

def cmd_factor(args) -> int:
    fac = factorize(args.n)
    print(" * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in fac) or "1")
    return 0


def cmd_deriv(args) -> int:
    print(_value(subderivative(args.n, _prime_set(args)), args.float))
    return 0


def cmd_ld(args) -> int:
    print(_value(log_subderivative(args.n, _prime_set(args)), args.float))
    return 0


def cmd_eval(args) -> int:
    spec = load_spec(args.spec) if args.spec else builtin_source(args.builtin).spec
    print(_value(evaluate(spec, args.n), args.float))
    return 0


def cmd_decompose(args) -> int:
    spec = load_spec(args.spec) if args.spec else builtin_source(args.builtin).spec
    g, h = decompose(spec)
    doc = {"g": {"x": prime_map_to_json(g.x)}, "h": {"y": prime_map_to_json(h.y)}}
    print(json.dumps(doc, indent=2))
    return 0


def cmd_tabulate(args) -> int:
    spec = _spec(args)
    write_table(tabulate(spec, args.limit), args.out if args.out else sys.stdout)
    return 0


def cmd_reconstruct(args) -> int:
    table = read_table(args.table)
    bound = args.primes if args.primes is not None else math.isqrt(table.limit)
    try:
        h = reconstruct_h(table, bound)
    except ZeroCompanionError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(prime_map_to_json(h.y), indent=2))
    return 0


def cmd_check(args) -> int:
    table = read_table(args.table)
    result = check_l_additive(table, args.primes)
    print(result.describe())
    if args.report:
        full = check_conditions(table, args.exponents, args.primes)
        print(json.dumps(full.to_json(), indent=2))
    return 0 if result.accepted else 1


def cmd_bounds(args) -> int:
    n = args.n
    if n < 2:
        raise UsageError("bounds need n >= 2")
    spec = _spec(args)
    if spec is None:
        verdicts = bounds.classic_bounds(n) + [bounds.westrick_bound(n),
                                               bounds.westrick_improvement(n)]
    else:
        verdicts = (bounds.extended_upper(spec, n) + [bounds.extended_westrick(spec, n),
                                                      bounds.extended_lower(spec, n)])
    print(f"n = {n}, class = {bounds.classify_equality(n).kind}")
    rows = [("bound", "lhs", "rhs", "relation")]
    for v in verdicts:
        lhs, rhs = format_rational(v.lhs), format_rational(v.rhs)
        if args.float:
            lhs += f" (~{float(Fraction(v.lhs)):.6g})"
            rhs += f" (~{float(Fraction(v.rhs)):.6g})"
        rows.append((v.name, lhs, rhs, v.label))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)) + "  " + r[3])
    return 1 if any(v.relation == bounds.VIOLATED for v in verdicts) else 0


def cmd_sweep(args) -> int:
    sources = list(args.builtin or [])
    for path in args.spec or []:
        sources.append(load_spec(path))
    for path in args.table or []:
        sources.append((path, read_table(path)))
    if not sources:
        sources = ["D"]
    props = [p for p in args.props.split(",") if p] if args.props else list(PROPERTIES)
    try:
        config = SweepConfig(args.max, sources, props, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = report_json(run_sweep(config))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    report = json.loads(text)
    return 1 if has_violations(report) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ladditive",
        description="Arithmetic subderivatives and Leibniz-additive functions, exactly.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("factor", help="prime factorization of n")
    p.add_argument("n", type=_natural)
    p.set_defaults(func=cmd_factor)

    for name, func, what in (("deriv", cmd_deriv, "arithmetic subderivative D_S(n)"),
                             ("ld", cmd_ld, "logarithmic subderivative ld_S(n)")):
        p = sub.add_parser(name, help=what)
        p.add_argument("n", type=_natural)
        _add_prime_set_flags(p)
        p.add_argument("--float", action="store_true", help="add an approximate decimal column")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="evaluate a Leibniz-additive spec at n")
    p.add_argument("spec", nargs="?", help="function-spec JSON file")
    p.add_argument("n", type=_natural)
    p.add_argument("--builtin", metavar="NAME", help="use a named function instead of a file")
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decompose", help="print the g and h of f = g h")
    p.add_argument("spec", nargs="?", help="function-spec JSON file")
    p.add_argument("--builtin", metavar="NAME")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tabulate", help="write f(1..N) as an n,f CSV table")
    _add_spec_source(p)
    p.add_argument("limit", type=_natural)
    p.add_argument("-o", "--out", metavar="FILE")
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("reconstruct", help="recover h_f at primes from a table")
    p.add_argument("table", help="n,f CSV table")
    p.add_argument("--primes", type=_natural, metavar="P", help="largest prime to reconstruct")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("check", help="test a table for Leibniz-additivity on its range")
    p.add_argument("table", help="n,f CSV table")
    p.add_argument("--primes", type=_natural, metavar="P")
    p.add_argument("--exponents", type=_natural, default=3, metavar="B",
                   help="exponent bound for the --report condition sweep")
    p.add_argument("--report", action="store_true", help="also print every condition verdict")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="exact bound verdicts at n")
    p.add_argument("n", type=_natural)
    _add_spec_source(p, required=False)
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="exhaustive property sweep, JSON report")
    p.add_argument("--max", type=_natural, required=True, metavar="N")
    p.add_argument("--builtin", action="append", metavar="NAME")
    p.add_argument("--spec", action="append", metavar="FILE")
    p.add_argument("--table", action="append", metavar="FILE")
    p.add_argument("--props", metavar="P1,P2", help=f"subset of {','.join(PROPERTIES)}")
    p.add_argument("--workers", type=_natural, default=1)
    p.add_argument("-o", "--out", metavar="FILE")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command in ("eval", "decompose") and bool(args.spec) == bool(args.builtin):
        print(f"ladditive {args.command}: give a spec file or --builtin, not both", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, SpecError, TableFormatError, ThetaError, MissingDataError,
            ReconstructionError, ValueError, OSError) as exc:
        print(f"ladditive {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
