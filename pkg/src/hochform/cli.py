"""Command line driver.

`hochform verify` runs the verification suites under a budget and writes a
deterministic JSON report plus a human-readable summary; the exit code is
0 when everything passed, 1 on identity failures, 2 on usage errors and
3 on internal inconsistencies (a broken precondition inside a suite).
"""

from __future__ import annotations

import argparse
import json
import sys

from .suites import SUITES, RunConfig, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hochform")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--vars", type=int, default=2)
    v.add_argument("--max-weight", type=int, default=2)
    v.add_argument("--max-arity", type=int, default=3)
    v.add_argument("--max-factors", type=int, default=3)
    v.add_argument("--max-word-len", type=int, default=3)
    v.add_argument("--max-coef-deg", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="repeatable; default runs every suite")
    v.add_argument("--json", dest="json_path", metavar="PATH",
                   help="write the full JSON report here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if min(args.vars, args.max_arity, args.max_factors, args.max_word_len) < 1 \
            or args.max_coef_deg < 0:
        print("error: counts must be positive", file=sys.stderr)
        return 2
    config = RunConfig(
        vars=args.vars,
        max_weight=args.max_weight,
        max_arity=args.max_arity,
        max_factors=args.max_factors,
        max_word_len=args.max_word_len,
        max_coef_deg=args.max_coef_deg,
        seed=args.seed,
        suites=tuple(args.suite or ()),
        output_path=args.json_path,
    )
    try:
        status, report = run(config)
    except (ValueError, AssertionError) as exc:
        print("internal inconsistency: %s" % exc, file=sys.stderr)
        return 3
    text = json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(text)
    for rep in report["reports"]:
        line = "%-12s checked=%-6d failures=%d" % (
            rep["suite"], rep["checked"], len(rep["failures"]))
        print(line)
        for f in rep["failures"][:5]:
            print("    FAIL %s" % json.dumps(f, sort_keys=True, default=str))
    print("total failures: %d" % report["total_failures"])
    return status


if __name__ == "__main__":
    sys.exit(main())
