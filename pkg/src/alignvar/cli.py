"""Command-line entry point: ``alignvar <verb> [options]``.

Exit codes: 0 success, 1 usage error, 2 a verification check failed,
3 sampling gave up (no eligible word within the retry budget).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from alignvar.events import EpsilonParams, validate_parameters
from alignvar.experiments import DEFAULT_SIZES, EXPERIMENTS, ExperimentConfig, write_outputs
from alignvar.sampling import InfeasibleProfileError
from alignvar.scoring import to_fraction

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INFEASIBLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sizes", type=_sizes, default=DEFAULT_SIZES, help="comma-separated lengths")
    p.add_argument("--replicas", type=int, default=1000)
    p.add_argument("--s11", type=_rational, default=Fraction(50), help="score of a 1-1 match")
    p.add_argument("--eps", type=_rational, default=Fraction(2, 5))
    p.add_argument("--eps1", type=_rational, default=Fraction(1, 10))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strict-paper-thresholds", action="store_true",
                   help="use the literal n-proportional B3/B4 thresholds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alignvar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="store_true", help="print the version and exit")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)
    for verb, text in (("variance", "sample variance of the optimal score"),
                       ("delta-bias", "exact law of the score change per replica"),
                       ("chain-slope", "score along the transfer chain"),
                       ("events", "frequencies of the typicality events"),
                       ("verify", "run the exact oracle suite"),
                       ("validate-params", "check the smallness conditions on eps, eps1, s11")):
        p = sub.add_parser(verb, help=text)
        _common(p)
        if verb == "chain-slope":
            p.add_argument("--steps", type=int, default=40)
            p.add_argument("--window-exponent", type=_rational, default=Fraction(1, 10))
            p.add_argument("--rate", type=_rational, default=Fraction(1, 100))
        if verb == "verify":
            p.add_argument("--quick", action="store_true", help="smaller sweeps")
    return parser


def _config(args) -> ExperimentConfig:
    extra = {}
    if args.verb == "chain-slope":
        extra = {"steps": args.steps, "window_exponent": args.window_exponent, "rate": args.rate}
    return ExperimentConfig(
        sizes=args.sizes, replicas=args.replicas, s11=args.s11, eps=args.eps, eps1=args.eps1,
        seed=args.seed, workers=args.workers, out=args.out,
        strict_paper_thresholds=args.strict_paper_thresholds, **extra,
    )


def _write_table(out_dir: Path, name: str, fmt: str, header: list, rows: list) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[r[h] for h in header] for r in rows])
        (out_dir / f"{name}.csv").write_text(buf.getvalue())
    else:
        (out_dir / f"{name}.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")


def _run_verify(args) -> int:
    from alignvar.verify import run_verification

    results = run_verification(seed=args.seed, quick=args.quick)
    rows = [{"check": r.name, "passed": int(r.passed), "informational": int(r.informational),
             "detail": r.detail} for r in results]
    out = Path(args.out)
    _write_table(out, "verify", args.format, ["check", "passed", "informational", "detail"], rows)
    (out / "manifest.json").write_text(json.dumps(
        {"experiment": "verify", "seed": args.seed, "quick": args.quick}, indent=2) + "\n")
    for r in results:
        tag = "PASS" if r.passed else ("INFO" if r.informational else "FAIL")
        print(f"{tag:4} {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed or r.informational for r in results) else EXIT_VERIFY


def _run_validate(args) -> int:
    ledger = validate_parameters(EpsilonParams(args.eps, args.eps1), args.s11)
    rows = [{"condition": c.name, "holds": "" if c.holds is None else int(c.holds),
             "detail": c.detail} for c in ledger.conditions + ledger.printed_variants]
    out = Path(args.out)
    _write_table(out, "validate-params", args.format, ["condition", "holds", "detail"], rows)
    (out / "manifest.json").write_text(json.dumps(
        {"experiment": "validate-params", "eps": str(args.eps), "eps1": str(args.eps1),
         "s11": str(args.s11), "overall": ledger.overall}, indent=2) + "\n")
    for r in rows:
        print(f"{r['condition']:14} {r['holds']!s:2} {r['detail']}")
    print("all conditions hold" if ledger.overall else "some conditions fail")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        from alignvar import __version__

        print(__version__)
        return EXIT_OK
    if args.verb is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.verb == "verify":
        return _run_verify(args)
    if args.verb == "validate-params":
        try:
            EpsilonParams(args.eps, args.eps1)
        except ValueError as exc:
            print(f"alignvar: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return _run_validate(args)
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"alignvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        record = EXPERIMENTS[args.verb](cfg)
    except InfeasibleProfileError as exc:
        print(f"alignvar: sampling failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    path = write_outputs(record, args.out, args.format)
    print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
