"""
Free product and restricted free product commands.
"""

import argparse

from lib.constants import EXIT_UNKNOWN
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds

from services.extension import global_patterns
from services.patterns import Sft
from services.products import free_product, restricted_free_product
from services.specfile import SpecFile

from commands.common import load_spec

logger = get_logger("commands.products")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("freeprod", parents=[parent], help="free product X * Y of two SFTs")
    p.add_argument("spec", help="path to a .sds spec file")
    p.add_argument("left", help="sft section for X")
    p.add_argument("right", help="sft section for Y")
    p.add_argument("--patterns", action="store_true", help="list the admissible ball patterns")
    p.set_defaults(handler=freeprod)

    p = subparsers.add_parser("rfp", parents=[parent], help="restricted free product over two letter maps")
    p.add_argument("spec", help="path to a .sds spec file")
    p.add_argument("left", help="sft section for X")
    p.add_argument("right", help="sft section for Y")
    p.add_argument("left_map", metavar="phi", help="map section from the X alphabet")
    p.add_argument("right_map", metavar="psi", help="map section from the Y alphabet")
    p.add_argument("--patterns", action="store_true", help="list the admissible ball patterns")
    p.set_defaults(handler=rfp)


def _report(z: Sft, args: argparse.Namespace, bounds: SearchBounds) -> Report:
    fmt = z.group.format_element
    found = global_patterns(z, bounds.radius, bounds.margin)
    lines = [
        f"group: {z.group.describe()}",
        f"alphabet: {' '.join(z.alphabet)}",
        f"window: {' '.join(fmt(w) for w in z.window)}",
        f"allowed rows: {len(z.allowed)}",
        f"ball({bounds.radius}) patterns at margin {bounds.margin}: {len(found)}",
        f"stabilized: {'yes' if found.stabilized else 'no'}",
    ]
    if args.patterns:
        for p in found.patterns:
            lines.append("  " + " ".join(f"{z.alphabet[a]}@{fmt(g)}" for g, a in zip(p.support, p.row)))
    if not found.stabilized:
        logger.warning(f"pattern count may still drop beyond margin {bounds.margin}")
        return Report(lines=lines, exit_code=EXIT_UNKNOWN)
    return Report(lines=lines)


def _pair(spec: SpecFile, args: argparse.Namespace):
    return spec.sft(args.left), spec.sft(args.right)


def freeprod(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    x, y = _pair(spec, args)
    return _report(free_product(x, y), args, bounds)


def rfp(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    x, y = _pair(spec, args)
    phi0, psi0 = spec.alphabet_map(args.left_map), spec.alphabet_map(args.right_map)
    return _report(restricted_free_product(x, y, phi0, psi0), args, bounds)
