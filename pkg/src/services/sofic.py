"""
Sofic shifts over Z as edge-labeled graphs.

A presentation's shift is the set of label sequences of bi-infinite paths.
The canonical form is computed from the language alone, so two presentations
get identical canonical forms exactly when they present the same shift:

1. subset construction from the set of all vertices (a DFA for the language),
2. Moore partition refinement (the minimal DFA, unique up to isomorphism),
3. numbering by breadth-first search from the start state with labels in order,
4. deletion of states without predecessors; then, if some terminal strongly
   connected component already has the full language, only that component
   is kept (for irreducible shifts this is the Fischer cover).
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from lib.errors import StructuralError
from lib.logging_config import get_logger

from services.codes import AlphabetMap
from services.patterns import Sft
from services.words import block_digraph, prune, require_integers

logger = get_logger("services.sofic")

LabeledEdge = Tuple[int, int, int]
Table = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class SoficPresentation:
    """Vertices 0..n-1 and edges (u, v, label index)."""

    labels: Tuple[str, ...]
    vertex_count: int
    edges: Tuple[LabeledEdge, ...]

    def __post_init__(self):
        n, size = self.vertex_count, len(self.labels)
        for u, v, a in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"edge {u} -> {v} uses a vertex outside 0..{n - 1}")
            if not 0 <= a < size:
                raise StructuralError(f"edge label {a} is not in the label alphabet")

    @classmethod
    def build(cls, labels: Sequence[str], vertex_count: int, edges: Iterable[LabeledEdge]) -> "SoficPresentation":
        return cls(tuple(labels), vertex_count, tuple(sorted(set(edges))))

    @property
    def is_empty(self) -> bool:
        return not self.edges

    def multigraph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        for u, v, a in self.edges:
            graph.add_edge(u, v, label=self.labels[a])
        return graph

    def essential(self) -> "SoficPresentation":
        """Restriction to vertices on bi-infinite paths, renumbered in order."""
        skeleton = nx.DiGraph()
        skeleton.add_nodes_from(range(self.vertex_count))
        skeleton.add_edges_from((u, v) for u, v, _ in self.edges)
        kept = sorted(prune(skeleton).nodes)
        index = {v: k for k, v in enumerate(kept)}
        edges = [(index[u], index[v], a) for u, v, a in self.edges if u in index and v in index]
        return SoficPresentation.build(self.labels, len(kept), edges)

    def is_right_resolving(self) -> bool:
        seen = set()
        for u, _, a in self.edges:
            if (u, a) in seen:
                return False
            seen.add((u, a))
        return True

    def language(self, n: int) -> Set[Tuple[int, ...]]:
        """Label words of n-edge paths in the essential part."""
        core = self.essential()
        if core.is_empty:
            return set()
        if n <= 0:
            return {()}
        out: Dict[int, List[Tuple[int, int]]] = {}
        for u, v, a in core.edges:
            out.setdefault(u, []).append((v, a))
        frontier: Dict[int, Set[Tuple[int, ...]]] = {v: {()} for v in range(core.vertex_count)}
        for _ in range(n):
            nxt: Dict[int, Set[Tuple[int, ...]]] = {}
            for u, words in frontier.items():
                for v, a in out.get(u, []):
                    nxt.setdefault(v, set()).update(w + (a,) for w in words)
            frontier = nxt
        result: Set[Tuple[int, ...]] = set()
        for words in frontier.values():
            result |= words
        return result

    def disjoint_union(self, other: "SoficPresentation") -> "SoficPresentation":
        if other.labels != self.labels:
            raise StructuralError("presentations use different label alphabets")
        shift = self.vertex_count
        edges = list(self.edges) + [(u + shift, v + shift, a) for u, v, a in other.edges]
        return SoficPresentation.build(self.labels, self.vertex_count + other.vertex_count, edges)

    def describe(self) -> List[str]:
        lines = [f"labels: {' '.join(self.labels)}", f"vertices: {self.vertex_count}"]
        lines.extend(f"edge {u} {v} {self.labels[a]}" for u, v, a in self.edges)
        return lines

    def to_gml(self) -> str:
        return "\n".join(nx.generate_gml(self.multigraph())) + "\n"


def from_digraph(graph: nx.DiGraph, m: AlphabetMap) -> SoficPresentation:
    """Edge (u, v) of a vertex-labeled graph gets the label m(label(u))."""
    nodes = sorted(graph.nodes)
    index = {v: k for k, v in enumerate(nodes)}
    edges = [
        (index[u], index[v], m(graph.nodes[u]["label"]))
        for u, v in graph.edges
    ]
    return SoficPresentation.build(m.target, len(nodes), edges)


def image_sofic(x: Sft, m: AlphabetMap) -> SoficPresentation:
    """Presentation of the image of a Z-SFT under the 1-block code of m."""
    require_integers(x)
    if m.source != x.alphabet:
        raise StructuralError("map source alphabet differs from the SFT alphabet")
    return from_digraph(block_digraph(x), m)


# ----------------------------------------------------------------------
# Canonical form
# ----------------------------------------------------------------------


def _transitions(p: SoficPresentation) -> Dict[int, Dict[int, Set[int]]]:
    out: Dict[int, Dict[int, Set[int]]] = {}
    for u, v, a in p.edges:
        out.setdefault(u, {}).setdefault(a, set()).add(v)
    return out


def _determinize(p: SoficPresentation, start: FrozenSet[int]) -> List[Dict[int, int]]:
    """Subset DFA; state 0 is ``start``, missing entries go to the dead state."""
    out = _transitions(p)
    states: List[FrozenSet[int]] = [start]
    index = {start: 0}
    delta: List[Dict[int, int]] = []
    k = 0
    while k < len(states):
        current = states[k]
        row: Dict[int, int] = {}
        for a in range(len(p.labels)):
            target = frozenset(v for u in current for v in out.get(u, {}).get(a, ()))
            if not target:
                continue
            if target not in index:
                index[target] = len(states)
                states.append(target)
            row[a] = index[target]
        delta.append(row)
        k += 1
    logger.debug(f"subset construction: {len(states)} states")
    return delta


def _minimize(delta: List[Dict[int, int]], alphabet_size: int) -> List[int]:
    """Moore refinement; returns the block of every state."""
    block = [0] * len(delta)
    count = 1
    while True:
        signatures: Dict[Tuple, int] = {}
        refined = []
        for q, row in enumerate(delta):
            key = (block[q],) + tuple(block[row[a]] if a in row else -1 for a in range(alphabet_size))
            refined.append(signatures.setdefault(key, len(signatures)))
        block = refined
        if len(signatures) == count:
            return block
        count = len(signatures)


def _canonical_dfa(p: SoficPresentation, start: FrozenSet[int]) -> Table:
    """Minimal DFA of the language read from ``start``, numbered by BFS."""
    delta = _determinize(p, start)
    size = len(p.labels)
    block = _minimize(delta, size)
    quotient: Dict[int, Dict[int, int]] = {}
    for q, row in enumerate(delta):
        quotient.setdefault(block[q], {a: block[t] for a, t in row.items()})
    order = [block[0]]
    seen = {block[0]}
    k = 0
    while k < len(order):
        for a in range(size):
            t = quotient[order[k]].get(a)
            if t is not None and t not in seen:
                seen.add(t)
                order.append(t)
        k += 1
    number = {b: k for k, b in enumerate(order)}
    return tuple(
        tuple(number[quotient[b][a]] if a in quotient[b] else -1 for a in range(size))
        for b in order
    )


def _table_edges(table: Table, keep: Sequence[int]) -> List[LabeledEdge]:
    index = {q: k for k, q in enumerate(keep)}
    return [
        (index[q], index[t], a)
        for q in keep
        for a, t in enumerate(table[q])
        if t != -1 and t in index
    ]


def canonical_form(s: SoficPresentation) -> SoficPresentation:
    """Right-resolving, follower-separated presentation determined by the shift."""
    core = s.essential()
    if core.is_empty:
        return SoficPresentation.build(s.labels, 0, [])
    table = _canonical_dfa(core, frozenset(range(core.vertex_count)))

    skeleton = nx.DiGraph()
    skeleton.add_nodes_from(range(len(table)))
    skeleton.add_edges_from((q, t) for q, row in enumerate(table) for t in row if t != -1)
    live = sorted(prune(skeleton).nodes)
    chosen: Optional[List[int]] = None

    condensed = nx.condensation(skeleton.subgraph(live))
    terminal = sorted(
        sorted(condensed.nodes[c]["members"])
        for c in condensed.nodes
        if condensed.out_degree(c) == 0
    )
    for members in terminal:
        component = SoficPresentation.build(s.labels, len(members), _table_edges(table, members))
        if _canonical_dfa(component, frozenset(range(len(members)))) == table:
            chosen = members
            break
    keep = chosen if chosen is not None else live
    logger.debug(
        f"canonical form: {len(table)} DFA states, kept {len(keep)}"
        + (" (terminal component)" if chosen is not None else "")
    )
    return SoficPresentation.build(s.labels, len(keep), _table_edges(table, keep))


def sofic_equal(s1: SoficPresentation, s2: SoficPresentation) -> bool:
    if s1.labels != s2.labels:
        raise StructuralError("presentations use different label alphabets")
    return canonical_form(s1) == canonical_form(s2)


def eventually_periodic(
    labels: Sequence[str], left: Sequence[int], middle: Sequence[int], right: Sequence[int]
) -> SoficPresentation:
    """Orbit closure of the point ...left left middle right right...

    ``left`` and ``right`` are nonempty period words; the presentation has one
    cycle per period word joined by a chain through ``middle``.
    """
    if not left or not right:
        raise StructuralError("period words must be nonempty")
    graph = nx.DiGraph()
    letters = list(left) + list(middle) + list(right)
    for k, a in enumerate(letters):
        graph.add_node(k, label=a)
    p, q, r = len(left), len(middle), len(right)
    graph.add_edges_from((k, (k + 1) % p) for k in range(p))
    # chain from the last left vertex through middle to the first right vertex
    graph.add_edges_from((k, k + 1) for k in range(p - 1, p + q))
    graph.add_edges_from((p + q + k, p + q + (k + 1) % r) for k in range(r))
    return from_digraph(graph, AlphabetMap.identity(labels))
