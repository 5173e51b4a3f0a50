"""Command-line front end.

Exit codes: 0 all verdicts passed, 1 a mathematical check failed (the report
holds the witness), 2 usage or resource error.  The JSON report goes to
stdout or ``--out``; a one-line summary goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .report import Report
from .shuffle import ResampleExhausted

SEED_ENV = "SHUFFLE_BETHE_SEED"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    from .fusion import VARIANTS
    from .suites import SUITES

    ap = argparse.ArgumentParser(prog="shuffle-bethe", description="Exact checks for Bethe subalgebras "
                                                                   "of gl(m|n) shuffle algebras.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    v.add_argument("--trials", type=_positive, default=5)
    v.add_argument("--bound", type=_positive, default=1000)
    v.add_argument("--resample-budget", type=_positive, default=20)
    v.add_argument("--jobs", type=_positive, default=1)
    v.add_argument("--m", type=int, default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--max-mn", type=int, default=3, help="identities: 0 <= M, N <= max-mn (cap 4)")
    v.add_argument("--max-c", type=int, default=3, help="identities: |c| <= max-c (cap 6)")
    v.add_argument("--max-N", type=int, default=2, help="degree cap (cap 3)")
    v.add_argument("--max-r", type=int, default=3, help="commutativity: r <= max-r (cap 5)")
    v.add_argument("--variant", choices=VARIANTS, default="erratum",
                   help="fusion correction factors used for verdicts")
    v.add_argument("--extended", action="store_true", help="fusion: also (3,1), (3,2), (4,0)")
    v.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    v.add_argument("--figures", default=None, metavar="DIR", help="write PNG summaries to DIR")

    e = sub.add_parser("eval", help="evaluate an element at a point")
    e.add_argument("element", help="element-spec JSON, inline or @file")
    e.add_argument("point", help="point JSON {q, d, s?, x}, inline or @file")

    d = sub.add_parser("dims", help="dim R_{K,N'} for N' <= N")
    d.add_argument("K", type=int)
    d.add_argument("N", type=int)
    d.add_argument("--figures", default=None, metavar="DIR")
    return ap


def _load_json(arg: str):
    try:
        if arg.startswith("@"):
            with open(arg[1:]) as fh:
                return json.load(fh)
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {arg!r}: {exc}")


def _scalar(v):
    """"xi", [a, b] (= a + b xi) or anything Fraction accepts."""
    from .exact import UniRatFunction

    if v == "xi":
        return UniRatFunction.xi()
    if isinstance(v, list):
        if len(v) != 2:
            raise UsageError(f"linear value must be [a, b], got {v!r}")
        return UniRatFunction.linear(Fraction(str(v[0])), Fraction(str(v[1])))
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact scalar: {v!r}")


def cmd_eval(element_arg: str, point_arg: str) -> str:
    from .exact import fmt_scalar
    from .shuffle import element_from_json, evaluate
    from .signature import ParamPoint

    spec, pt = _load_json(element_arg), _load_json(point_arg)
    try:
        e = element_from_json(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed element spec: {exc}")
    if not isinstance(pt, dict) or "x" not in pt:
        raise UsageError("point JSON needs 'x' (one list per color)")
    try:
        p = ParamPoint(_scalar(pt.get("q", 2)), _scalar(pt.get("d", 3)),
                       tuple(_scalar(v) for v in pt.get("s", [1] * e.sig.K)))
        x = tuple(tuple(_scalar(v) for v in row) for row in pt["x"])
        return fmt_scalar(evaluate(e, p, x))
    except ZeroDivisionError:
        raise UsageError("the element has a pole at this point")
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_dims(K: int, N: int) -> list[int]:
    from .bethe import dims_table

    if K < 1 or N < 0:
        raise UsageError("need K >= 1 and N >= 0")
    return dims_table(K, N)


def _validate_sizes(args):
    caps = {"max_mn": 4, "max_c": 6, "max_N": 3, "max_r": 5}
    for name, cap in caps.items():
        v = getattr(args, name)
        if not 0 <= v <= cap:
            raise UsageError(f"--{name.replace('_', '-')} must lie in [0, {cap}]")
    if args.m is not None:
        from .signature import AlgebraSignature

        try:
            AlgebraSignature(args.m, args.n or 0)
        except ValueError as exc:
            raise UsageError(f"invalid signature: {exc}")


def cmd_verify(args, argv: Sequence[str]) -> tuple[int, Report]:
    from .suites import RunConfig, build_tasks, run_tasks

    _validate_sizes(args)
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = RunConfig(seed=seed, trials=args.trials, bound=max(args.bound, 2), budget=args.resample_budget,
                    jobs=args.jobs, m=args.m, n=args.n, max_mn=args.max_mn, max_c=args.max_c,
                    max_N=args.max_N, max_r=args.max_r, variant=args.variant, extended=args.extended)
    tasks = build_tasks(args.suite, cfg)
    if not tasks:
        raise UsageError("the size flags select no checks")
    config = cfg.to_dict()
    config["suite"] = args.suite
    report = Report(list(argv), config)
    report.extend(run_tasks(tasks, cfg))
    return (EXIT_OK if report.passed else EXIT_FAIL), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "eval":
            print(cmd_eval(args.element, args.point))
            return EXIT_OK
        if args.command == "dims":
            values = cmd_dims(args.K, args.N)
            print(", ".join(map(str, values)))
            if args.figures:
                from .plotting import plot_dims

                os.makedirs(args.figures, exist_ok=True)
                plot_dims(args.K, values, os.path.join(args.figures, f"dims_K{args.K}.png"))
            return EXIT_OK
        code, report = cmd_verify(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResampleExhausted, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    data = report.to_dict()
    text = json.dumps(data, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.figures:
        from .plotting import write_report_figures

        write_report_figures(data, args.figures, stem=f"verify_{args.suite}")
    s = data["summary"]
    disc = f", {len(s['discrepancies'])} discrepancy probe(s) flagged" if s["discrepancies"] else ""
    print(f"{args.suite}: {s['passed']}/{s['total']} passed{disc} in {s['wall_time_s']}s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
