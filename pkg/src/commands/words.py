"""
Language, essential-form and recoding commands.
"""

import argparse
from pathlib import Path

import networkx as nx

from lib.errors import StructuralError
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds
from lib.utils import format_word, plural

from services.patterns import Sft
from services.rauzy import to_rauzy
from services.words import block_digraph, higher_block, language, language_counts

from commands.common import add_spec_arguments, load_spec, write_text

logger = get_logger("commands.words")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("lang", parents=[parent], help="word counts of a Z-SFT up to --length")
    add_spec_arguments(p)
    p.add_argument("--words", action="store_true", help="also list the words of length --length")
    p.set_defaults(handler=lang)

    p = subparsers.add_parser("essential", parents=[parent], help="conjugate essential Rauzy graph")
    add_spec_arguments(p)
    p.add_argument("--gml", type=Path, help="write the graph as GML to this file")
    p.set_defaults(handler=essential)

    p = subparsers.add_parser("recode", parents=[parent], help="higher-block recoding of a Z-SFT")
    add_spec_arguments(p)
    p.add_argument("--level", type=int, default=2, help="block length of the recoding (default 2)")
    p.add_argument("--gml", type=Path, help="write the graph as GML to this file")
    p.set_defaults(handler=recode)


def _sft(args: argparse.Namespace) -> Sft:
    return load_spec(args.spec).pick("sft", args.name)  # type: ignore[return-value]


def lang(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    x = _sft(args)
    counts = language_counts(x, bounds.length)
    lines = [f"alphabet: {' '.join(x.alphabet)}"]
    lines.extend(f"length {n}: {count}" for n, count in enumerate(counts, 1))
    if args.words:
        lines.append(f"words of length {bounds.length}:")
        lines.extend(f"  {format_word(x.alphabet, w)}" for w in language(x, bounds.length))
    return Report(lines=lines)


def essential(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    x = _sft(args)
    rec = to_rauzy(x, bounds.margin, bounds.factor_order_cap, bounds.subgroup_search_depth)
    graph = rec.graph
    fmt = graph.group.format_element
    lines = [
        f"group: {graph.group.describe()}",
        f"window: {' '.join(fmt(w) for w in rec.window)}",
        f"vertices: {len(graph.vertices)}",
    ]
    for k, name in enumerate(graph.vertices):
        lines.append(f"  {k} {name} -> {x.alphabet[rec.letters[k]]}")
    for s in graph.group.generators:
        edges = sorted(graph.edges(s))
        lines.append(f"relation {fmt(s)}: {plural(len(edges), 'edge')}")
        lines.extend(f"  {u} {v}" for u, v in edges)
    if args.gml:
        write_text(args.gml, graph.to_gml())
    return Report(lines=lines)


def recode(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    if args.level < 1:
        raise StructuralError("recoding level must be at least 1")
    x = _sft(args)
    graph = higher_block(block_digraph(x), args.level)
    order = sorted(graph.nodes)
    index = {v: k for k, v in enumerate(order)}
    edges = sorted((index[u], index[v]) for u, v in graph.edges)
    lines = [
        f"level: {args.level}",
        f"vertices: {len(order)}",
    ]
    for v in order:
        attrs = graph.nodes[v]
        lines.append(f"  {index[v]} {attrs['name']} -> {x.alphabet[attrs['label']]}")
    lines.append(f"edges: {len(edges)}")
    lines.extend(f"  {u} {v}" for u, v in edges)
    if args.gml:
        named = nx.DiGraph()
        for v in order:
            named.add_node(index[v], name=graph.nodes[v]["name"], letter=x.alphabet[graph.nodes[v]["label"]])
        named.add_edges_from(edges)
        write_text(args.gml, "\n".join(nx.generate_gml(named)) + "\n")
    return Report(lines=lines)
