"""
Pseudo-orbit tracing and inverse-system commands.
"""

import argparse

from lib.constants import EXIT_NEGATIVE
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds
from lib.utils import format_word

from services.patterns import Sft
from services.shadowing import InverseSystem, PseudoOrbit, ml_check, sft_shadowing_suite, validate_and_trace

from commands.common import add_spec_arguments, load_spec, verdict_report

logger = get_logger("commands.shadowing")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("trace", parents=[parent], help="trace a pseudo-orbit, or run the tracing suite")
    add_spec_arguments(p)
    p.add_argument("--suite", action="store_true",
                   help="trace every pseudo-orbit of the sft up to --length instead")
    p.add_argument("--level", type=int, default=1, help="coarse level k of the suite (default 1)")
    p.set_defaults(handler=trace)

    p = subparsers.add_parser("ml-check", parents=[parent], help="stabilization of images in an inverse system")
    add_spec_arguments(p)
    p.add_argument("--base", type=int, default=1, help="level whose images are compared (default 1)")
    p.set_defaults(handler=ml_check_command)


def trace(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    if args.suite:
        x: Sft = spec.pick("sft", args.name)  # type: ignore[assignment]
        return verdict_report(sft_shadowing_suite(x, args.level, bounds.length, bounds.pseudo_orbit_budget))
    p: PseudoOrbit = spec.pick("pseudo-orbit", args.name)  # type: ignore[assignment]
    result = validate_and_trace(p)
    alphabet = p.sft.alphabet
    lines = [
        f"blocks: {' '.join(format_word(alphabet, b) for b in p.blocks)}",
        f"levels: fine {p.fine}, coarse {p.coarse}",
        f"status: {'traced' if result.traced else 'refused'}",
        f"trace: {result.render(alphabet)}",
    ]
    return Report(lines=lines, exit_code=0 if result.traced else EXIT_NEGATIVE)


def ml_check_command(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    system: InverseSystem = load_spec(args.spec).pick("system", args.name)  # type: ignore[assignment]
    depth = bounds.depth
    available = len(system) - args.base + 1
    # the configured default stops at the last level; an explicit --depth does not
    if args.depth is None and depth > available > 0:
        logger.debug(f"depth {depth} reaches past level {len(system)}; using {available}")
        depth = available
    return verdict_report(ml_check(system, args.base, depth), [f"levels: {len(system)}"])
