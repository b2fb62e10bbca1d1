"""
Isolation, middle-cycle and minimality commands.
"""

import argparse

from lib.constants import EXIT_NEGATIVE
from lib.errors import StructuralError
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds
from lib.utils import parse_word

from services.analysis import isolated_check, minimal_check, nmc_check, projective_isolation
from services.patterns import Sft
from services.sofic import SoficPresentation
from services.words import block_digraph, higher_block, hull_words

from commands.common import add_spec_arguments, load_spec, verdict_report

logger = get_logger("commands.analysis")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("isolated", parents=[parent], help="certify or refute isolation of a Z-SFT")
    add_spec_arguments(p)
    p.add_argument("--f-radius", type=int, help="F = {0..R} (default: the window span)")
    p.add_argument("--map", help="map section; with --target checks projective isolation")
    p.add_argument("--target", help="presentation section the image must equal")
    p.set_defaults(handler=isolated)

    p = subparsers.add_parser("nmc", parents=[parent], help="no-middle-cycle test on the block graph")
    add_spec_arguments(p)
    p.add_argument("--level", type=int, default=1, help="higher-block level of the graph (default 1)")
    p.set_defaults(handler=nmc)

    p = subparsers.add_parser("minimal", parents=[parent], help="minimality, optionally relative to cylinders")
    add_spec_arguments(p)
    p.add_argument("--cylinder", action="append", default=[], metavar="WORD",
                   help="cylinder word at 0; repeat for a family")
    p.set_defaults(handler=minimal)


def _sft(args: argparse.Namespace) -> Sft:
    return load_spec(args.spec).pick("sft", args.name)  # type: ignore[return-value]


def isolated(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    x: Sft = spec.pick("sft", args.name)  # type: ignore[assignment]
    f_radius = args.f_radius
    if f_radius is None:
        m, _ = hull_words(x)
        f_radius = m - 1
    limits = (bounds.window, bounds.length, bounds.cap, bounds.cycle_vertex_cap)
    if args.map or args.target:
        if not (args.map and args.target):
            raise StructuralError("--map and --target go together")
        target: SoficPresentation = spec.get("presentation", args.target)  # type: ignore[assignment]
        verdict = projective_isolation(x, spec.alphabet_map(args.map), target, f_radius, *limits)
    else:
        verdict = isolated_check(x, f_radius, *limits)
    return verdict_report(verdict)


def nmc(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    if args.level < 1:
        raise StructuralError("recoding level must be at least 1")
    x = _sft(args)
    graph = higher_block(block_digraph(x), args.level)
    result = nmc_check(graph, bounds.cycle_vertex_cap)
    lines = [
        f"level: {args.level}",
        f"vertices: {graph.number_of_nodes()}",
        f"cycles checked: {result.cycles_checked}",
    ]
    if result.holds:
        return Report(lines=["status: no-middle-cycle"] + lines)
    cycle = " ".join(graph.nodes[v]["name"] for v in result.witness or ())
    return Report(lines=["status: middle-cycle"] + lines + [f"middle cycle: {cycle}"], exit_code=EXIT_NEGATIVE)


def minimal(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    x = _sft(args)
    cylinders = []
    for text in args.cylinder:
        try:
            cylinders.append(tuple(parse_word(x.alphabet, text)))
        except ValueError as e:
            raise StructuralError(f"cylinder {text!r}: {e}")
    return verdict_report(minimal_check(x, cylinders, bounds.window))
