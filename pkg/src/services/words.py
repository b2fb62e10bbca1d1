"""
Word-level tools for subshifts over Z.

Over Z an SFT is the vertex shift of its block graph: vertices are the
(m-1)-words of its window hull (m the hull length), edges the allowed m-words.
Every vertex is labeled by its first letter, so the n-words of the shift are
the label sequences of n-vertex paths in the essential part of the graph.
Graphs here are networkx DiGraphs whose nodes carry a ``label`` attribute (a
letter index) and a ``name`` used when vertices become colors or states.
"""

from itertools import product
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from lib.errors import UnsupportedInputError
from lib.logging_config import get_logger
from lib.utils import format_word

from services.group import Group, GroupElement, integers
from services.patterns import Row, Sft

logger = get_logger("services.words")

Word = Tuple[int, ...]


def require_integers(x: Sft) -> None:
    if not x.group.is_integers:
        raise UnsupportedInputError("operation is only defined for subshifts over Z")


def hull_words(x: Sft) -> Tuple[int, FrozenSet[Word]]:
    """Locally admissible words on the interval hull of the window."""
    require_integers(x)
    offsets = [x.group.to_int(w) for w in x.window]
    lo, hi = min(offsets), max(offsets)
    m = hi - lo + 1
    places = [o - lo for o in offsets]
    size = len(x.alphabet)
    if len(places) == m:
        order = sorted(range(m), key=lambda k: places[k])
        return m, frozenset(tuple(row[k] for k in order) for row in x.allowed)
    words = set()
    for word in product(range(size), repeat=m):
        if tuple(word[p] for p in places) in x.allowed:
            words.add(word)
    return m, frozenset(words)


def prune(graph: nx.DiGraph) -> nx.DiGraph:
    """Essential part: repeatedly drop vertices without in- or out-edges."""
    g = graph.copy()
    while True:
        stale = [v for v in g.nodes if g.in_degree(v) == 0 or g.out_degree(v) == 0]
        if not stale:
            return g
        g.remove_nodes_from(stale)


def block_digraph(x: Sft) -> nx.DiGraph:
    """Essential block graph of a Z-SFT; nodes are letter tuples labeled by their first letter."""
    m, words = hull_words(x)
    graph = nx.DiGraph()
    if m == 1:
        letters = sorted(w[0] for w in words)
        for a in letters:
            graph.add_node((a,), label=a, name=x.alphabet[a])
        graph.add_edges_from(((a,), (b,)) for a in letters for b in letters)
    else:
        for word in sorted(words):
            u, v = word[:-1], word[1:]
            graph.add_node(u, label=u[0], name=format_word(x.alphabet, u))
            graph.add_node(v, label=v[0], name=format_word(x.alphabet, v))
            graph.add_edge(u, v)
    return prune(graph)


def word_sft(alphabet: Sequence[str], length: int, words: Iterable[Word], group: Optional[Group] = None) -> Sft:
    """Z-SFT with window {0, ..., length-1} allowing exactly ``words``."""
    group = group or integers()
    window = tuple(group.from_int(k) for k in range(length))
    return Sft(group, tuple(alphabet), window, frozenset(tuple(w) for w in words))


def words_of(graph: nx.DiGraph, n: int) -> Set[Tuple[Hashable, ...]]:
    """Label sequences of n-vertex paths."""
    if n <= 0:
        return {()} if graph.number_of_nodes() else set()
    frontier: Dict[Hashable, Set[Tuple[Hashable, ...]]] = {
        v: {(graph.nodes[v]["label"],)} for v in graph.nodes
    }
    for _ in range(n - 1):
        nxt: Dict[Hashable, Set[Tuple[Hashable, ...]]] = {}
        for u, found in frontier.items():
            for v in graph.successors(u):
                label = graph.nodes[v]["label"]
                bucket = nxt.setdefault(v, set())
                bucket.update(w + (label,) for w in found)
        frontier = nxt
    result: Set[Tuple[Hashable, ...]] = set()
    for found in frontier.values():
        result |= found
    return result


def language(x: Sft, n: int) -> List[Word]:
    """Sorted n-words of a Z-SFT."""
    return sorted(words_of(block_digraph(x), n))


def language_counts(x: Sft, max_length: int) -> List[int]:
    graph = block_digraph(x)
    return [len(words_of(graph, n)) for n in range(1, max_length + 1)]


def higher_block(graph: nx.DiGraph, level: int) -> nx.DiGraph:
    """Level-n recoding: vertices are n-vertex paths, labeled by their first vertex's label."""
    if level <= 1:
        return graph.copy()
    paths: List[Tuple[Hashable, ...]] = [(v,) for v in graph.nodes]
    for _ in range(level - 1):
        paths = [p + (v,) for p in paths for v in graph.successors(p[-1])]
    result = nx.DiGraph()
    for p in paths:
        name = ".".join(str(graph.nodes[v].get("name", v)) for v in p)
        result.add_node(p, label=graph.nodes[p[0]]["label"], name=name)
    by_prefix: Dict[Tuple[Hashable, ...], List[Tuple[Hashable, ...]]] = {}
    for p in paths:
        by_prefix.setdefault(p[:-1], []).append(p)
    for p in paths:
        for q in by_prefix.get(p[1:], []):
            result.add_edge(p, q)
    return prune(result)


def rauzy_digraph(
    vertices: Sequence[str], edges: Iterable[Tuple[int, int]], letters: Optional[Sequence[int]] = None
) -> nx.DiGraph:
    """DiGraph of a Z Rauzy relation; vertex k is labeled letters[k] (default k)."""
    graph = nx.DiGraph()
    for k, name in enumerate(vertices):
        graph.add_node(k, label=letters[k] if letters is not None else k, name=name)
    graph.add_edges_from(edges)
    return graph


def occurs(word: Sequence[Hashable], inside: Sequence[Hashable]) -> bool:
    n = len(word)
    return any(tuple(inside[i:i + n]) == tuple(word) for i in range(len(inside) - n + 1))


def factors_of(word: Sequence[Hashable], n: int) -> Set[Tuple[Hashable, ...]]:
    return {tuple(word[i:i + n]) for i in range(len(word) - n + 1)}


def interval(group: Group, lo: int, hi: int) -> Tuple[GroupElement, ...]:
    return tuple(group.from_int(k) for k in range(lo, hi + 1))


def row_to_word(x: Sft, row: Row) -> Word:
    """Reorder a window row of a Z-SFT into reading order."""
    offsets = [x.group.to_int(w) for w in x.window]
    return tuple(a for _, a in sorted(zip(offsets, row)))
