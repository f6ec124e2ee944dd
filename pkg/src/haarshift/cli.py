"""Command-line front end: ``haarshift <command> ...``.

Exact values print as canonical rationals or Q[√2] strings; ``--decimal N``
renders them as floats rounded to N places.  Exit codes: 2 for usage
errors, 1 for an engine/oracle mismatch in ``audit``, 0 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction

from .audit import DEFAULT_UNIVERSE, ORACLE_UNIVERSE, Universe, audit_claims, engine_oracle_ok, reports_to_json
from .bounds import annihilating_witness, bound_constant, extremal_interior, gap_lower_bound_check, pw_build, pw_mean_bound
from .dyadic import DyadicInterval
from .haar import dump_function, function_to_json, load_function, norm2
from .oracle import CSV_HEADER, smallest_singular
from .scalar import format_scalar, parse_scalar
from .shift import CaseClass, classify, interior_norm2, printed_interior_norm2, restricted_indicator_shift, restricted_shift, shift_full


class UsageError(Exception):
    pass


# negative numbers, intervals like -1:5 and ranges like -2..2 are values, not options
_NEGATIVE = re.compile(r"^-\d+(?::-?\d+|\.\.-?\d+)?$|^-\d*\.\d+$")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = _NEGATIVE

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _interval(text: str) -> DyadicInterval:
    try:
        return DyadicInterval.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_range(text: str) -> tuple:
    """``a..b`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like 'a..b', got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return tuple(range(lo, hi + 1))


def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {n}")
    return n


# rendering -----------------------------------------------------------------


def _decimalize(obj, places: int):
    """Replace exact scalar strings by floats rounded to ``places``."""
    if isinstance(obj, dict):
        return {k: (v if k in ("I", "K", "L", "root", "window") else _decimalize(v, places)) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decimalize(v, places) for v in obj]
    if isinstance(obj, str):
        try:
            return round(float(parse_scalar(obj)), places)
        except ValueError:
            return obj
    return obj


def _emit(doc, args, out=None) -> None:
    out = out or sys.stdout
    if args.decimal is not None:
        doc = _decimalize(doc, args.decimal)
    if args.json:
        json.dump(doc, out, ensure_ascii=False, indent=1)
        out.write("\n")
        return
    for key, value in doc.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        out.write(f"{key}: {value}\n")


def _q(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return format_scalar(x)


def _num(x):
    return x if isinstance(x, float) else _q(x)


# commands ------------------------------------------------------------------


def cmd_constant(args) -> int:
    I, K = args.i, args.k
    report = bound_constant(I, K)
    doc = {
        "I": str(I),
        "K": str(K),
        "case": report.case.value,
        "form": restricted_indicator_shift(I, K).to_json(),
        **{k: v for k, v in report.to_json().items() if k in ("exact_constant", "paper_bound", "rule")},
    }
    _emit(doc, args)
    return 0


def cmd_norm(args) -> int:
    f = load_function(args.f)
    if args.i is not None and args.i != f.root:
        raise UsageError(f"--i {args.i} does not match the root {f.root} of {args.f}")
    I, K = f.root, args.k
    result = restricted_shift(f, K)
    doc = {
        "I": str(I),
        "K": str(K),
        "case": classify(I, K).value,
        "norm2": _num(result.norm2),
        "norm2_f": _num(norm2(f)),
    }
    if classify(I, K) is CaseClass.INTERIOR:
        identity = interior_norm2(f, K)
        doc["identity_norm2"] = _num(identity)
        doc["identity_agrees"] = (identity == result.norm2) if f.exact else abs(identity - result.norm2) <= 1e-9 * max(1.0, abs(identity))
        if f.exact:
            doc["printed_norm2"] = _q(printed_interior_norm2(f, K))
    _emit(doc, args)
    return 0


def cmd_apply(args) -> int:
    f = load_function(args.f)
    g = shift_full(f, args.window, args.depth)
    if args.out:
        dump_function(g, args.out)
        _emit({"window": str(args.window), "depth": g.depth, "norm2": _num(norm2(g)), "out": args.out}, args)
    else:
        json.dump(function_to_json(g), sys.stdout, ensure_ascii=False, indent=1)
        sys.stdout.write("\n")
    return 0


def cmd_svd(args) -> int:
    constraint = "zero-mean" if args.zero_mean else "none"
    report = smallest_singular(args.i, args.k, args.depth, constraint, A=args.A, method=args.method)
    if args.json:
        doc = dict(zip(CSV_HEADER, report.csv_row()))
        doc["sigma_min"], doc["sigma_max"] = report.sigma_min, report.sigma_max
        _emit(doc, args)
        return 0
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerow(report.csv_row())
    return 0


def cmd_extremal(args) -> int:
    builder = annihilating_witness if args.witness else extremal_interior
    f = builder(args.i, args.k)
    if args.out:
        dump_function(f, args.out)
    result = restricted_shift(f, args.k)
    doc = {
        "I": str(args.i),
        "K": str(args.k),
        "kind": "witness" if args.witness else "extremal",
        "norm2_f": _q(norm2(f)),
        "norm2": _q(result.norm2),
    }
    if args.out:
        doc["out"] = args.out
    _emit(doc, args)
    return 0


def _load_coefficients(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("coefficient file must be a JSON object mapping mode to value")
    coeffs = {}
    for k, v in data.items():
        if isinstance(v, list) and len(v) == 2:
            coeffs[int(k)] = complex(float(v[0]), float(v[1]))
        elif isinstance(v, (int, float)):
            coeffs[int(k)] = complex(v)
        else:
            raise ValueError(f"coefficient {k!r} must be a number or [re, im]")
    return coeffs


def cmd_pw(args) -> int:
    f, eta = pw_build(args.i, _load_coefficients(args.coeffs), args.depth)
    bound = pw_mean_bound(f, eta)
    doc = {
        "I": str(args.i),
        "depth": args.depth,
        "eta": eta,
        "mean_mass": bound.mean_mass,
        "required": bound.required,
        "holds": bound.holds,
    }
    if args.k is not None:
        if eta >= 1:
            raise ValueError("the gap bound needs eta < 1")
        doc["gap"] = {"K": str(args.k), **gap_lower_bound_check(f, args.i, args.k, eta).to_json()}
    _emit(doc, args)
    return 0


def cmd_audit(args) -> int:
    claims = Universe(args.scales or DEFAULT_UNIVERSE.scales, args.indices or DEFAULT_UNIVERSE.indices)
    oracle = None
    if not args.no_oracle:
        oracle = Universe(args.oracle_scales or ORACLE_UNIVERSE.scales, args.oracle_indices or ORACLE_UNIVERSE.indices)
    reports = audit_claims(claims, oracle, depth=args.depth, A=args.A, seed=args.seed)
    text = reports_to_json(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        width = max(len(r.claim_id) for r in reports)
        for r in reports:
            sys.stdout.write(f"{r.claim_id:<{width}}  {r.status:<19}  {r.pairs_checked}\n")
    else:
        sys.stdout.write(text)
    return 0 if engine_oracle_ok(reports) else 1


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--decimal", type=_nonneg, metavar="N", help="render exact values as floats with N places")

    parser = _Parser(prog="haarshift", description="Exact restricted Haar shift calculus.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("constant", parents=[common], help="exact form of 1_K Ш 1_I and its constant")
    p.add_argument("--i", type=_interval, required=True, metavar="k:l")
    p.add_argument("--k", type=_interval, required=True, metavar="k:l")
    p.set_defaults(run=cmd_constant)

    p = sub.add_parser("norm", parents=[common], help="exact ||1_K Ш f||^2 for f read from a file")
    p.add_argument("--i", type=_interval, metavar="k:l", help="expected root of f")
    p.add_argument("--k", type=_interval, required=True, metavar="k:l")
    p.add_argument("--f", required=True, metavar="FILE")
    p.set_defaults(run=cmd_norm)

    p = sub.add_parser("apply", parents=[common], help="leaf values of 1_W Ш f")
    p.add_argument("--f", required=True, metavar="FILE")
    p.add_argument("--window", type=_interval, required=True, metavar="k:l")
    p.add_argument("--depth", type=_nonneg, metavar="D")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("svd", parents=[common], help="extreme singular values of 1_K Ш on functions on I")
    p.add_argument("--i", type=_interval, required=True, metavar="k:l")
    p.add_argument("--k", type=_interval, required=True, metavar="k:l")
    p.add_argument("--depth", type=_nonneg, required=True, metavar="D")
    p.add_argument("--zero-mean", action="store_true")
    p.add_argument("-A", type=_nonneg, default=40, help="ancestor height of the truncation")
    p.add_argument("--method", choices=("svd", "jacobi"), default="svd")
    p.set_defaults(run=cmd_svd)

    p = sub.add_parser("extremal", parents=[common], help="interior function proposed as annihilated")
    p.add_argument("--i", type=_interval, required=True, metavar="k:l")
    p.add_argument("--k", type=_interval, required=True, metavar="k:l")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--witness", action="store_true", help="use the corrected constant instead")
    p.set_defaults(run=cmd_extremal)

    p = sub.add_parser("pw", parents=[common], help="Poincaré–Wirtinger mean bound demo")
    p.add_argument("--i", type=_interval, required=True, metavar="k:l")
    p.add_argument("--coeffs", required=True, metavar="FILE")
    p.add_argument("--depth", type=_nonneg, default=10, metavar="D")
    p.add_argument("--k", type=_interval, metavar="k:l", help="disjoint K for the gap lower bound")
    p.set_defaults(run=cmd_pw)

    p = sub.add_parser("audit", parents=[common], help="check every catalogued claim")
    p.add_argument("--scales", type=_int_range, metavar="a..b")
    p.add_argument("--indices", type=_int_range, metavar="a..b")
    p.add_argument("--oracle-scales", type=_int_range, metavar="a..b")
    p.add_argument("--oracle-indices", type=_int_range, metavar="a..b")
    p.add_argument("--no-oracle", action="store_true", help="skip the engine/oracle sweep")
    p.add_argument("--depth", type=_nonneg, default=4, help="max leaf depth of the oracle sweep")
    p.add_argument("-A", type=_nonneg, default=24, help="ancestor height of the oracle sweep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(run=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"haarshift: {exc}\n")
        return 2
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else 0
