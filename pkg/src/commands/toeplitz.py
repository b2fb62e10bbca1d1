"""
Toeplitz coding commands.
"""

import argparse
from pathlib import Path

from lib.errors import StructuralError
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds

from services.toeplitz import format_window, generate, level_counts, parse_window, periodicity_check, recover

from commands.common import verdict_report

logger = get_logger("commands.toeplitz")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("toeplitz-gen", parents=[parent], help="Toeplitz window of a 1/2 word")
    p.add_argument("omega", help="word over 1 and 2, e.g. 121")
    p.add_argument("lo", type=int, help="first position")
    p.add_argument("hi", type=int, help="last position")
    p.set_defaults(handler=toeplitz_gen)

    p = subparsers.add_parser("toeplitz-recover", parents=[parent], help="read omega back off a window file")
    p.add_argument("window_file", metavar="window", type=Path, help="window file written by toeplitz-gen")
    p.add_argument("--levels", type=int, help="stop after this many levels")
    p.add_argument("--counts", action="store_true", help="also report positions per level and kind")
    p.set_defaults(handler=toeplitz_recover)


def toeplitz_gen(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    try:
        omega = [int(c) for c in args.omega]
    except ValueError:
        raise StructuralError(f"omega must be written with the digits 1 and 2, got {args.omega!r}")
    return Report(lines=format_window(generate(omega, args.lo, args.hi)))


def toeplitz_recover(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    try:
        text = args.window_file.read_text()
    except OSError as e:
        raise StructuralError(f"cannot read {args.window_file}: {e.strerror}")
    w = parse_window(text)
    found = recover(w, args.levels)
    lines = [
        f"omega: {''.join(str(a) for a in found.omega) or '(none)'}",
        f"levels: {len(found.omega)}",
        f"partial: {'yes' if found.partial else 'no'}",
    ]
    if args.counts:
        lines.append("positions:")
        for (level, kind), count in level_counts(w).items():
            lines.append(f"  level {level if level is not None else '-'} {kind}: {count}")
    return verdict_report(periodicity_check(w), lines)
