"""Command line front end: ``veriroot solve`` and ``veriroot family``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .expr import ExprSyntaxError, parse
from .interval import Interval
from .solver import InvalidDomain, SolverConfig, solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3

GRAMMAR_HELP = """\
expression grammar:
  numbers    decimal literals: 2, 0.125, .5, 1e-3
  variable   x
  operators  + - * / and unary minus, ^ with a nonnegative integer exponent
             (x^2^3 is rejected; write (x^2)^3)
  grouping   ( ... )
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return v


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _tolerance_flags(p):
    p.add_argument("--tau-x", type=_positive, default=1e-6, help="width tolerance (default 1e-6)")
    p.add_argument("--tau-w", type=_positive, default=1e-6, help="function tolerance (default 1e-6)")
    p.add_argument("--tau-c", type=_positive, default=None, help="cluster step (default sqrt(tau-x))")
    p.add_argument("--max-iter", type=int, default=200_000, help="iteration budget per solve")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="veriroot",
        description="Verified enclosures of all real roots of f on [lo, hi].",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser(
        "solve", help="enclose the roots of one expression",
        epilog=GRAMMAR_HELP, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    s.add_argument("--expr", required=True, help="f(x), e.g. \"(x-1)*(x-2)\"")
    s.add_argument("--lo", required=True, type=_finite)
    s.add_argument("--hi", required=True, type=_finite)
    _tolerance_flags(s)
    s.add_argument("--format", choices=("text", "json"), default="text")

    fam = sub.add_parser("family", help="sweep the integer-root polynomial family")
    fam.add_argument("--m", type=int, required=True, help="roots range over -m..m")
    fam.add_argument("--max-degree", type=int, required=True)
    _tolerance_flags(fam)
    fam.add_argument("--form", choices=("horner", "factored"), default="horner")
    fam.add_argument("--jobs", type=int, default=1, help="worker processes")
    fam.add_argument("--out", help="write per-spec CSV here (a .json path writes JSON)")
    return parser


def _config(args) -> SolverConfig:
    return SolverConfig(
        tau_x=args.tau_x, tau_w=args.tau_w, tau_c=args.tau_c, max_iterations=args.max_iter
    )


def candidate_record(c) -> dict:
    return {
        "lo": repr(c.lo),
        "hi": repr(c.hi),
        "lo_hex": c.lo.hex(),
        "hi_hex": c.hi.hex(),
        "sign_lo": int(c.sign_lo),
        "sign_hi": int(c.sign_hi),
        "status": c.status.value,
    }


def result_document(result, cfg: SolverConfig, expr_text: str, x0: Interval) -> dict:
    rep = result.report
    return {
        "roots": [candidate_record(c) for c in result.candidates],
        "stats": {
            "evaluations": rep.evaluations,
            "contractions": rep.contractions,
            "bisections": rep.bisections,
            "handoffs": rep.handoffs,
            "iterations": rep.iterations,
            "elapsed_ms": round(rep.elapsed_ms, 3),
            "complete": rep.complete,
            "tau_w_final": rep.tau_w_final,
        },
        "config": {
            "expr": expr_text,
            "lo": repr(x0.lo),
            "hi": repr(x0.hi),
            "tau_x": cfg.tau_x,
            "tau_w": cfg.tau_w,
            "tau_c": cfg.tau_c,
            "max_iterations": cfg.max_iterations,
        },
    }


def _cmd_solve(args) -> int:
    try:
        f = parse(args.expr)
    except ExprSyntaxError as exc:
        print(f"veriroot: syntax error: {exc.msg} at offset {exc.position}", file=sys.stderr)
        print(f"  {args.expr}\n  {' ' * exc.position}^", file=sys.stderr)
        return EXIT_USAGE
    try:
        x0 = Interval(args.lo, args.hi)
    except ValueError as exc:
        print(f"veriroot: bad interval: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _config(args)
        result = solve(f, x0, cfg)
    except (InvalidDomain, ValueError) as exc:
        print(f"veriroot: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        print(json.dumps(result_document(result, cfg, args.expr, x0), indent=2))
    else:
        rep = result.report
        print(f"{len(result.candidates)} candidate(s) for {args.expr} on [{x0.lo!r}, {x0.hi!r}]")
        for c in result.candidates:
            print(
                f"  [{c.lo!r}, {c.hi!r}]  signs ({int(c.sign_lo):+d}, {int(c.sign_hi):+d})"
                f"  {c.status.value}"
            )
        print(
            f"evaluations={rep.evaluations} contractions={rep.contractions} "
            f"bisections={rep.bisections} handoffs={rep.handoffs} "
            f"elapsed_ms={rep.elapsed_ms:.2f}"
        )
    if not result.complete:
        print("veriroot: iteration budget exhausted; results are partial", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_family(args) -> int:
    from .polyfam import run_family

    if args.m < 1 or args.max_degree < 1:
        print("veriroot: --m and --max-degree must be positive", file=sys.stderr)
        return EXIT_USAGE
    report = run_family(args.m, args.max_degree, _config(args), form=args.form, jobs=args.jobs)
    if args.out:
        text = report.to_json() if args.out.endswith(".json") else report.to_csv()
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(report.to_csv())
    print(json.dumps(report.summary()), file=sys.stderr)
    if report.incomplete:
        return EXIT_BUDGET
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "solve":
        return _cmd_solve(args)
    return _cmd_family(args)


if __name__ == "__main__":
    sys.exit(main())
