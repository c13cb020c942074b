#!/usr/bin/env python3
"""
Hidden periodic orbits engine - command line

Exit codes: 0 success, 1 mathematical failure, 2 usage or input error.
"""
import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from config import config
from engine.classify import (
    COUNTEREXAMPLE_CASES,
    POSITIVE_CASES,
    LinearSpec,
    builtin_example,
    classify_linear,
    positive_witness,
    verify_theorem,
    witness_germ,
)
from engine.dold import dold_report, eigenvalue_orders, admissible_periods, index_consistency
from engine.errors import ClassificationError, EngineError, GermFormatError, WitnessParameterError
from engine.exactnum import format_coeff
from engine.jet import GermMap, dumps_germ, format_germ
from engine.multiplicity import FixedPointIndexer
from engine.normalform import poincare_dulac, resonant_support
from engine.numverify import NumericConfig, numeric_orbit_count
from engine.reports import NormalFormSummary
from utils import (
    format_periods,
    load_germ,
    render_consistency,
    render_dold_table,
    render_numeric,
    render_scan,
    render_verdict,
    save_germ,
)


class UsageError(Exception):
    """Bad flags or inconsistent input (exit code 2)"""


def _write_germ(germ: GermMap, output: Optional[str], as_json: bool):
    if output:
        save_germ(germ, output)
        print(f"💾 Saved germ to {output}")
    elif as_json:
        sys.stdout.write(dumps_germ(germ))
    else:
        print(format_germ(germ))
        print()
        sys.stdout.write(dumps_germ(germ))


def _linear_spec(args) -> LinearSpec:
    try:
        return LinearSpec(
            level=args.level,
            k1=args.k1,
            k2=args.k2,
            diagonalizable=not args.jordan,
            free_eigenvalue=Fraction(args.free) if args.free is not None else None,
        )
    except (ClassificationError, ValueError, ZeroDivisionError) as e:
        raise UsageError(f"invalid linear part: {e}") from e


def _coefficients(text: Optional[str]) -> Optional[List[Fraction]]:
    if text is None:
        return None
    try:
        values = [Fraction(item.strip()) for item in text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"--a expects four rationals a11,a12,a21,a22, got {text!r}") from e
    if len(values) != 4:
        raise UsageError(f"--a expects four rationals a11,a12,a21,a22, got {text!r}")
    return values


# --- commands ---------------------------------------------------------------------

def cmd_check(args) -> int:
    germ = load_germ(args.germ)
    A = germ.linear_part()
    orders = eigenvalue_orders(A)
    periods = admissible_periods(A)
    if args.json:
        document = {
            "zeta_order": germ.context.level,
            "truncation": germ.truncation,
            "eigenvalue_orders": list(orders),
            "admissible_periods": list(periods),
        }
        print(json.dumps(document, indent=2))
        return 0
    print(f"✅ valid germ over Q(zeta_{germ.context.level}), truncation D = {germ.truncation}")
    print(f"   f = {format_germ(germ)}")
    print(f"   linear part: {A}")
    print(f"   eigenvalue orders: {list(orders)}")
    print(f"   admissible periods: {format_periods(list(periods))}")
    return 0


def cmd_index(args) -> int:
    germ = load_germ(args.germ)
    indexer = FixedPointIndexer(germ, period=args.m, method=args.method)
    result = indexer.index(args.m)
    if args.json:
        document = {"m": args.m, "mu": result.order, "method": result.method, "truncation": indexer.degree}
        print(json.dumps(document, indent=2))
        return 0
    print(f"mu(f^{args.m})(0) = {result.order}   ({result.method}, D = {indexer.degree})")
    return 0


def cmd_dold(args) -> int:
    germ = load_germ(args.germ)
    indexer = FixedPointIndexer(germ, period=args.period)
    if args.consistency:
        report = index_consistency(germ, args.period, indexer)
        print(report.model_dump_json(indent=2) if args.json else render_consistency(report))
        return 0
    table = dold_report(germ, args.period, indexer)
    if args.json:
        print(table.model_dump_json(indent=2))
        return 0
    print(render_dold_table(table))
    print(f"P_{args.period} = {table.dold_index}")
    return 0 if table.consistent else 1


def cmd_orbits(args) -> int:
    germ = load_germ(args.germ)
    table = dold_report(germ, args.period, FixedPointIndexer(germ, period=args.period))
    if args.json:
        print(table.model_dump_json(indent=2))
        return 0 if table.consistent else 1
    print(render_dold_table(table))
    print(f"O_{args.period} = {table.orbit_count}")
    return 0 if table.consistent else 1


def cmd_classify(args) -> int:
    spec = _linear_spec(args)
    if args.period <= 1:
        raise UsageError(f"period must exceed 1, got {args.period}")
    verdict = classify_linear(spec, args.period)
    print(verdict.model_dump_json(indent=2) if args.json else render_verdict(verdict))
    return 0


def cmd_witness(args) -> int:
    spec = _linear_spec(args)
    case = args.case
    if case == "auto":
        verdict = classify_linear(spec, args.period)
        if verdict.case is None:
            raise UsageError(f"no witness: {verdict.detail}")
        case = verdict.case
    if case in POSITIVE_CASES:
        germ = positive_witness(case, spec, args.period, args.truncation)
    else:
        germ = witness_germ(case, spec, args.period, _coefficients(args.a) or (1, 2, 1, 1), args.truncation)
    _write_germ(germ, args.output, args.json)
    return 0


def cmd_example(args) -> int:
    params = {"truncation": args.truncation}
    if args.name == "e2":
        params["k"] = args.k
    else:
        params.update(m1=args.m1, m2=args.m2, a=_coefficients(args.a))
    germ = builtin_example(args.name, **params)
    _write_germ(germ, args.output, args.json)
    return 0


def cmd_normalform(args) -> int:
    germ = load_germ(args.germ)
    result = poincare_dulac(germ, args.degree)
    support = resonant_support(result.normalized, args.degree)
    if args.output:
        save_germ(result.normalized, args.output)
    A = result.normalized.linear_part()
    if args.json:
        summary = NormalFormSummary(
            degree=args.degree,
            eigenvalues=[format_coeff(A.a11), format_coeff(A.a22)],
            support=[relation.as_list() for relation in support],
            transform_terms=sum(len(c.terms) for c in result.transform.components),
        )
        print(summary.model_dump_json(indent=2))
        return 0
    print(f"normal form through degree {args.degree}:")
    print(f"   g = {format_germ(result.normalized.with_truncation(args.degree))}")
    print(f"   H = {format_germ(result.transform.with_truncation(args.degree))}")
    print("surviving terms (j, i1, i2):")
    for relation in support:
        print(f"   {tuple(relation.as_list())} {'resonant' if relation.holds else 'NOT resonant'}")
    return 0 if all(relation.holds for relation in support) else 1


def cmd_verify(args) -> int:
    germ = load_germ(args.germ)
    overrides = {"seed": args.seed}
    for key in ("radius", "starts"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.epsilon:
        overrides["epsilons"] = args.epsilon
    try:
        cfg = NumericConfig(**overrides)
    except ValueError as e:
        raise UsageError(f"invalid numeric settings: {e}") from e
    if args.threads < 1:
        raise UsageError(f"--threads must be at least 1, got {args.threads}")
    exact = None
    if not args.no_exact:
        exact = dold_report(germ, args.period).orbit_count
    count = numeric_orbit_count(germ, args.period, cfg, exact=exact, threads=args.threads)
    print(count.model_dump_json(indent=2) if args.json else render_numeric(count))
    if not count.agree:
        return 1
    return 0 if exact is None or count.count == exact else 1


def cmd_theorem_scan(args) -> int:
    report = verify_theorem(
        max_lcm=args.max_lcm,
        samples=args.samples,
        seed=args.seed,
        threads=args.threads,
        reduce=not args.no_reduce,
    )
    print(report.model_dump_json(indent=2) if args.json else render_scan(report))
    return 0 if report.passed else 1


# --- parser -----------------------------------------------------------------------

def _add_linear_flags(parser: argparse.ArgumentParser, require_period: bool = True):
    parser.add_argument("--level", "-L", type=int, required=True, help="cyclotomic level L (lambda_i = zeta_L^k_i)")
    parser.add_argument("--k1", type=int, required=True, help="exponent of lambda1")
    parser.add_argument("--k2", type=int, default=0, help="exponent of lambda2")
    parser.add_argument("--jordan", action="store_true", help="non-diagonalizable linear part (needs k1 == k2)")
    parser.add_argument("--free", help="rational lambda2 that is not a root of unity, e.g. 2 or 3/2")
    parser.add_argument("--period", "-M", type=int, required=require_period, help="period M")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--debug", action="store_true", help="enable debug mode")
    common.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="random seed")

    parser = argparse.ArgumentParser(
        prog="hidden_orbits.py",
        description="Exact hidden periodic orbit counts for planar holomorphic germs",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("check", parents=[common], help="validate a germ file")
    p.add_argument("germ", help="germ file (JSON)")
    p.set_defaults(handler=cmd_check)

    p = commands.add_parser("index", parents=[common], help="fixed point index of f^m")
    p.add_argument("germ")
    p.add_argument("--m", type=int, required=True, help="iteration count")
    p.add_argument("--method", choices=["auto", "dual_space"], default="auto")
    p.set_defaults(handler=cmd_index)

    p = commands.add_parser("dold", parents=[common], help="Dold index table")
    p.add_argument("germ")
    p.add_argument("--period", "-M", type=int, required=True)
    p.add_argument("--consistency", action="store_true", help="recompute mu(f^M) independently")
    p.set_defaults(handler=cmd_dold)

    p = commands.add_parser("orbits", parents=[common], help="hidden orbit count O_M")
    p.add_argument("germ")
    p.add_argument("--period", "-M", type=int, required=True)
    p.set_defaults(handler=cmd_orbits)

    p = commands.add_parser("classify", parents=[common], help="decide condition (B) for a linear part")
    _add_linear_flags(p)
    p.set_defaults(handler=cmd_classify)

    p = commands.add_parser("witness", parents=[common], help="write a witness germ")
    _add_linear_flags(p)
    p.add_argument("--case", choices=("auto",) + POSITIVE_CASES + COUNTEREXAMPLE_CASES, default="auto")
    p.add_argument("--a", help="b4p coefficients a11,a12,a21,a22")
    p.add_argument("--truncation", "-D", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_witness)

    p = commands.add_parser("example", parents=[common], help="write a builtin example germ")
    p.add_argument("name", choices=["e2", "c8", "e1"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m1", type=int, default=2)
    p.add_argument("--m2", type=int, default=3)
    p.add_argument("--a", help="c8 coefficients a11,a12,a21,a22")
    p.add_argument("--truncation", "-D", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_example)

    p = commands.add_parser("normalform", parents=[common], help="Poincare-Dulac normal form")
    p.add_argument("germ")
    p.add_argument("--degree", "-r", type=int, required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(handler=cmd_normalform)

    p = commands.add_parser("verify", parents=[common], help="numeric cross-check of O_M")
    p.add_argument("germ")
    p.add_argument("--period", "-M", type=int, required=True)
    p.add_argument("--epsilon", type=float, nargs="+", help="perturbation sizes")
    p.add_argument("--radius", type=float)
    p.add_argument("--starts", type=int)
    p.add_argument("--threads", type=int, default=config.THREADS, help="worker processes, one per perturbation size")
    p.add_argument("--no-exact", action="store_true", help="skip the exact comparison")
    p.set_defaults(handler=cmd_verify)

    p = commands.add_parser("theorem-scan", parents=[common], help="check the classification end to end")
    p.add_argument("--max-lcm", type=int, default=config.SCAN_MAX_LCM)
    p.add_argument("--samples", type=int, default=config.SCAN_SAMPLES)
    p.add_argument("--threads", type=int, default=config.THREADS)
    p.add_argument("--no-reduce", action="store_true", help="compute every cell, no Galois reduction")
    p.set_defaults(handler=cmd_theorem_scan)

    return parser


def _usage_error(command: Optional[str], message: str) -> int:
    print(f"❌ {message}", file=sys.stderr)
    hint = f"hidden_orbits.py {command} --help" if command else "hidden_orbits.py --help"
    print(f"💡 see '{hint}'", file=sys.stderr)
    return 2


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, dispatch, and return the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.debug:
        config.DEBUG = True
        config.VERBOSE_LOGGING = True

    try:
        return args.handler(args)
    except (UsageError, GermFormatError, WitnessParameterError) as e:
        return _usage_error(args.command, str(e))
    except OSError as e:
        return _usage_error(args.command, f"cannot access file: {e}")
    except EngineError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
