"""Oracle command line: generate fixtures, cross-validate results.

Exit codes mirror the primary CLI: 0 success, 1 input/validation failure,
2 cross-validation mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .curves import OracleError
from .generate import OracleRequest, generate_fixtures
from .validate import cross_validate


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eulerlab-oracle")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit fixture JSON from a request file")
    p.add_argument("request", help="OracleRequest JSON path")
    p.add_argument("--out", required=True, help="fixture output path")

    p = sub.add_parser("cross-validate", help="compare primary results to fixtures")
    p.add_argument("fixtures")
    p.add_argument("results")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--report", help="write the JSON report here (default stdout)")

    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "generate":
            request = OracleRequest.from_json(args.request)
            generate_fixtures(request, args.out)
            return 0
        if args.command == "cross-validate":
            report = cross_validate(args.fixtures, args.results, args.tol)
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            if args.report:
                Path(args.report).write_text(text, encoding="utf-8", newline="\n")
            else:
                sys.stdout.write(text)
            return 0 if report["pass"] else 2
    except OracleError as exc:
        print(f"[oracle] error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"[oracle] i/o error: {exc}", file=sys.stderr)
        return 1
    return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
