"""Command-line entry point.

Exit codes: 0 when every verdict passes, 1 when some verdict fails, 2 for
usage errors and unmet preconditions.  Diagnostics for code 2 go to stderr
as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import report
from .serialize import SerializationError

COMMANDS = ("bar", "dual", "double-dual", "verify", "operad-check", "compare-models")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _diag("usage", message)
        sys.exit(2)


def _diag(kind, message, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")


def _dims(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="koszulcat", description="Bar constructions and Koszul duals of small dg categories.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--example", default="kfi", help="one of: " + ", ".join(report.EXAMPLES))
    common.add_argument("--window", type=int, default=None, help="largest object (default 3; 2 for square_zero)")
    common.add_argument("--arity", type=int, default=3, help="arity cap for operad examples")
    common.add_argument("--field", default="q", help="'q' for the rationals or 'p=PRIME'")
    common.add_argument("--degree", type=int, default=0, help="degree of the generators")
    common.add_argument("--dims", type=_dims, default=None, help="square_zero: dims of M(i+1,i)")
    common.add_argument("--sign", action="store_true", help="operad_binary: sign action on the generator")
    common.add_argument("--input", default=None, help="custom: a saved algebra document")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--timing", action="store_true", help="include wall time in the report")
    common.add_argument("--allow-large", action="store_true", help="lift the size caps")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    bar = sub.add_parser("bar", parents=[common], help="homology of the bar construction")
    bar.add_argument("--right", choices=("R", "C"), default="R", help="right side of B(R,C,-)")
    sub.add_parser("dual", parents=[common], help="homology of the Koszul dual")
    dd = sub.add_parser("double-dual", parents=[common], help="double dual at truncations N-1 and N")
    dd.add_argument("--trunc", type=int, default=4)
    v = sub.add_parser("verify", parents=[common], help="invariant suite for an example")
    v.add_argument("--samples", type=int, default=5, help="random instances when --seed is given")
    sub.add_parser("operad-check", parents=[common], help="operad Koszul comparison up to the arity cap")
    sub.add_parser("compare-models", parents=[common], help="dual against the derived-hom model")
    return p


def _spec(args):
    window = args.window
    if window is None:
        window = 2 if args.example in ("square_zero", "free") else 3
    return report.ExampleSpec(args.example, window, args.arity, report.parse_field(args.field),
                              args.degree, args.dims, args.sign, args.input)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = _spec(args)
        spec.check(args.allow_large)
        kw = {}
        if args.command == "bar":
            kw["right"] = args.right
        elif args.command == "double-dual":
            if not 1 <= args.trunc <= (99 if args.allow_large else report.MAX_TRUNC):
                raise report.PreconditionError(f"trunc must be between 1 and {report.MAX_TRUNC}")
            kw["trunc"] = args.trunc
        elif args.command == "verify":
            kw["seed"], kw["samples"] = args.seed, args.samples
        rep = report.run(args.command, spec, **kw)
    except SerializationError as e:
        _diag("input", str(e), where=e.where)
        return 2
    except (report.PreconditionError, ValueError, OSError) as e:
        _diag("precondition", str(e))
        return 2
    if not args.timing:
        rep.metrics.pop("seconds", None)
    text = rep.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
