"""Command-line front end.

Thin client over :mod:`diracreduce.commands`: it reads the document,
runs the handler and prints the report.  Exit codes: 0 for ok, 2 when
the mathematical outcome is negative (reduction obstructed, a condition
fails, a sweep point fails), 1 for invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .commands import COMMANDS, EXIT_CODES, run_command
from .reports import text_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracreduce",
        description="Exact pointwise reduction of generalized complex structures")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run {name} on a document")
        p.add_argument("file", help="input document (diracreduce-v1 format)")
        p.add_argument("--format", choices=("text", "machine"), default="text",
                       help="report format (default: text)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for deterministic sweep point selection")
        p.add_argument("--points", type=int, default=None,
                       help="evaluate only this many sample points of a sweep")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 1
    report = run_command(args.command, text, seed=args.seed, points=args.points)
    if args.format == "machine":
        sys.stdout.write(report.machine_text())
    else:
        sys.stdout.write(text_report(report))
    return EXIT_CODES[report.status]


if __name__ == "__main__":
    sys.exit(main())
