"""Command line interface.

    akgrav derive  <scenario-file | catalog:NAME>
    akgrav check   <scenario-file | catalog:NAME> [--negative-control CHECK]
    akgrav compare <scenario-file | catalog:NAME>
    akgrav catalog list

Exit codes: 0 all checks pass, 1 a check failed, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
import traceback

from .errors import AkgravError, ScenarioError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _tolerance(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected CHECK=VALUE, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}") from exc


def build_parser():
    p = _Parser(prog="akgrav", description="Derive and verify the almost Kahler structure and connections of a d-metric.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (("derive", "dump every derived object"),
                           ("check", "run the invariant suite"),
                           ("compare", "compare Levi-Civita, d-connection and constant-coefficient connection")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("scenario", help="scenario file or catalog:NAME")
        s.add_argument("--points", type=int, default=None, help="number of sample points")
        s.add_argument("--seed", type=int, default=None, help="sampling seed")
        s.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="CHECK=VALUE",
                       help="override a check tolerance (repeatable)")
        s.add_argument("--out", default=None, help="write the report to FILE instead of stdout")
        if name == "check":
            s.add_argument("--negative-control", default=None, metavar="CHECK",
                           help="corrupt the input of CHECK so that it must fail")
    c = sub.add_parser("catalog", help="built-in scenarios")
    c.add_argument("action", choices=["list"])
    return p


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    from . import pipeline
    from .scenario import catalog_names, load_scenario

    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            for name in catalog_names():
                print(f"catalog:{name}")
            return EXIT_OK
        if args.points is not None and args.points < 1:
            raise ScenarioError("--points must be >= 1")
        scenario = load_scenario(args.scenario)
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        if args.command == "derive":
            text = pipeline.run_derive(scenario, args.points, args.seed)
            _emit(f"# generated: {stamp}\n" + text + "\n", args.out)
            return EXIT_OK
        tols = dict(args.tol)
        if args.command == "check":
            unknown = [k for k in tols if k not in pipeline.DEFAULT_TOLERANCES]
            if unknown:
                raise ScenarioError(f"unknown check in --tol: {', '.join(unknown)}")
            report = pipeline.run_check(scenario, args.points, args.seed, tols, args.negative_control)
        else:
            report = pipeline.run_compare(scenario, args.points, args.seed)
        report.metadata["generated"] = stamp
        _emit(report.to_text(), args.out)
        return EXIT_OK if report.passed else EXIT_FAIL
    except ScenarioError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AkgravError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:  # pragma: no cover - reported as internal error
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
