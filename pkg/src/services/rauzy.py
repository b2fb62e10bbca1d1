"""
Rauzy graphs: the one-step form of an SFT over a free product.

A Rauzy graph carries one edge relation E_s per generator s. A configuration
of its vertex shift is a map y with (y(g), y(gs)) in E_s for all g and s. For
a finite factor G_j this means every coset gG_j carries a consistent coset
coloring c: G_j -> V with (c(h), c(hs)) in E_s.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from lib.constants import (
    DEFAULT_FACTOR_ORDER_CAP,
    DEFAULT_MARGIN,
    DEFAULT_SUBGROUP_SEARCH_DEPTH,
)
from lib.errors import BudgetError, StructuralError, UnsupportedInputError
from lib.logging_config import get_logger
from lib.utils import format_word

from services.extension import extendable_rows
from services.group import IDENTITY, Group, GroupElement, make_support
from services.patterns import Pattern, Row, Sft

logger = get_logger("services.rauzy")

Edge = Tuple[int, int]


def _transpose(edges: Iterable[Edge]) -> FrozenSet[Edge]:
    return frozenset((v, u) for u, v in edges)


@dataclass(frozen=True)
class RauzyGraph:
    """Vertices plus one relation per generator, aligned with ``group.generators``."""

    group: Group
    vertices: Tuple[str, ...]
    relations: Tuple[FrozenSet[Edge], ...]

    def __post_init__(self):
        gens = self.group.generators
        if len(self.relations) != len(gens):
            raise StructuralError("one relation per generator is required")
        n = len(self.vertices)
        for rel in self.relations:
            if any(not (0 <= u < n and 0 <= v < n) for u, v in rel):
                raise StructuralError("edge endpoint out of range")
        for s in gens:
            s_inv = self.group.inverse(s)
            if _transpose(self.edges(s)) != self.edges(s_inv):
                raise StructuralError(
                    f"relation of {self.group.format_element(s_inv)} must be the transpose "
                    f"of the relation of {self.group.format_element(s)}"
                )

    @classmethod
    def build(
        cls,
        group: Group,
        vertices: Sequence[str],
        relations: Mapping[GroupElement, Iterable[Edge]],
    ) -> "RauzyGraph":
        """Fill in missing relations: transposes of given inverses, else complete."""
        given = {s: frozenset(edges) for s, edges in relations.items()}
        for s in given:
            if s not in group.generators:
                raise StructuralError(f"{group.format_element(s)} is not a generator")
        n = len(vertices)
        complete = frozenset(product(range(n), repeat=2))
        rels = []
        for s in group.generators:
            if s in given:
                rels.append(given[s])
            elif group.inverse(s) in given:
                rels.append(_transpose(given[group.inverse(s)]))
            else:
                rels.append(complete)
        return cls(group, tuple(vertices), tuple(rels))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def edges(self, s: GroupElement) -> FrozenSet[Edge]:
        return self.relations[self.group.generators.index(s)]

    def edge_count(self, s: GroupElement) -> int:
        return len(self.edges(s))

    def digraph(self, s: Optional[GroupElement] = None) -> nx.DiGraph:
        """The relation of s (default: the positive generator of Z) as a networkx graph."""
        if s is None:
            s = self.z_step
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.vertices)))
        graph.add_edges_from(sorted(self.edges(s)))
        return graph

    @property
    def z_step(self) -> GroupElement:
        if not self.group.is_integers:
            raise UnsupportedInputError("operation needs a Rauzy graph over Z")
        return self.group.from_int(1)

    def subgraph(self, keep: Iterable[int], relations: Optional[Sequence[Iterable[Edge]]] = None) -> "RauzyGraph":
        """Induced (or edge-restricted) subgraph with vertices renumbered in order."""
        kept = sorted(set(keep))
        index = {v: k for k, v in enumerate(kept)}
        source = relations if relations is not None else self.relations
        rels = tuple(
            frozenset((index[u], index[v]) for u, v in rel if u in index and v in index)
            for rel in source
        )
        return RauzyGraph(self.group, tuple(self.vertices[v] for v in kept), rels)

    def to_gml(self) -> str:
        """GML text of all relations, one edge attribute per generator."""
        graph = nx.MultiDiGraph()
        for k, name in enumerate(self.vertices):
            graph.add_node(k, name=name)
        for s, rel in zip(self.group.generators, self.relations):
            if s.syllables[0][1] < 0 and not self.group.factors[s.syllables[0][0]].is_finite:
                continue
            for u, v in sorted(rel):
                graph.add_edge(u, v, generator=self.group.format_element(s))
        return "\n".join(nx.generate_gml(graph)) + "\n"


# ----------------------------------------------------------------------
# Coset colorings
# ----------------------------------------------------------------------


def coset_colorings(
    r: RauzyGraph,
    factor: int,
    alive: Optional[Set[int]] = None,
    relations: Optional[Sequence[FrozenSet[Edge]]] = None,
    first: Optional[int] = None,
    cap: int = DEFAULT_FACTOR_ORDER_CAP,
) -> Iterator[Tuple[int, ...]]:
    """Consistent colorings of the finite factor ``factor``, indexed like
    ``group.finite_factor_elements(factor)``.
    """
    group = r.group
    order = group.factors[factor].order or 0
    if order > cap:
        raise BudgetError(f"finite factor of order {order} exceeds the cap {cap}")
    elements = group.finite_factor_elements(factor)
    rels = relations if relations is not None else r.relations
    index = {s: k for k, s in enumerate(group.generators)}
    # step[i][j] = relation of h_i^-1 h_j
    step = [
        [
            rels[index[group.multiply(group.inverse(h), k)]] if i != j else None
            for j, k in enumerate(elements)
        ]
        for i, h in enumerate(elements)
    ]
    pool = sorted(alive) if alive is not None else list(range(len(r.vertices)))
    starts = [first] if first is not None else pool
    chosen: List[int] = []

    def extend(depth: int) -> Iterator[Tuple[int, ...]]:
        if depth == order:
            yield tuple(chosen)
            return
        candidates = starts if depth == 0 else pool
        for v in candidates:
            if all(
                (chosen[i], v) in step[i][depth] and (v, chosen[i]) in step[depth][i]
                for i in range(depth)
            ):
                chosen.append(v)
                yield from extend(depth + 1)
                chosen.pop()

    yield from extend(0)


# ----------------------------------------------------------------------
# Essentialization
# ----------------------------------------------------------------------


def essentialize(r: RauzyGraph, cap: int = DEFAULT_FACTOR_ORDER_CAP) -> RauzyGraph:
    """Greatest sub-structure with no sources/sinks and full coset colorings."""
    group = r.group
    gens = group.generators
    index = {s: k for k, s in enumerate(gens)}
    alive: Set[int] = set(range(len(r.vertices)))
    rels: List[FrozenSet[Edge]] = list(r.relations)

    changed = True
    while changed:
        changed = False
        rels = [frozenset((u, v) for u, v in rel if u in alive and v in alive) for rel in rels]
        for i, factor in enumerate(group.factors):
            if factor.is_finite:
                used: Dict[int, Set[Edge]] = {index[s]: set() for s in gens if s.syllables[0][0] == i}
                survivors: Set[int] = set()
                elements = group.finite_factor_elements(i)
                for coloring in coset_colorings(r, i, alive, rels, cap=cap):
                    survivors.update(coloring)
                    for a, h in enumerate(elements):
                        for b, k in enumerate(elements):
                            if a != b:
                                s = group.multiply(group.inverse(h), k)
                                used[index[s]].add((coloring[a], coloring[b]))
                for k, edges in used.items():
                    if frozenset(edges) != rels[k]:
                        rels[k] = frozenset(edges)
                        changed = True
            else:
                forward = index[group.reduce([(i, 1)])]
                rel = rels[forward]
                survivors = {u for u, _ in rel} & {v for _, v in rel}
            if survivors != alive:
                alive &= survivors
                changed = True
                rels = [frozenset((u, v) for u, v in rel if u in alive and v in alive) for rel in rels]
    result = r.subgraph(alive, rels)
    logger.debug(f"essentialize: {len(r.vertices)} -> {len(result.vertices)} vertices")
    return result


# ----------------------------------------------------------------------
# Recoding
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RauzyRecoding:
    """A Rauzy graph conjugate to an SFT, with the way back to its letters."""

    sft: Sft
    graph: RauzyGraph
    window: Tuple[GroupElement, ...]
    rows: Tuple[Row, ...]
    letters: Tuple[int, ...]

    @property
    def one_step(self) -> bool:
        return self.window == (IDENTITY,)

    def vertex_pattern(self, v: int) -> Pattern:
        return Pattern.from_row(self.window, self.rows[v])


def _one_step_relations(x: Sft) -> Optional[Dict[GroupElement, FrozenSet[Edge]]]:
    """Pairwise relations when x is already a vertex shift on its letters."""
    group = x.group
    if IDENTITY not in x.window:
        return None
    others = [w for w in x.window if not w.is_identity]
    if any(w not in group.generators for w in others):
        return None
    factors = [group.factor_of(w) for w in others]
    if len(set(factors)) != len(factors):
        return None
    centre = x.position[IDENTITY]
    letters = {row[centre] for row in x.allowed}
    relations: Dict[GroupElement, FrozenSet[Edge]] = {}
    for w in others:
        k = x.position[w]
        pairs = frozenset((row[centre], row[k]) for row in x.allowed)
        if group.inverse(w) == w:
            pairs = pairs & _transpose(pairs)
        relations[w] = pairs
    rebuilt = set()
    for a in letters:
        choices = []
        for w in x.window:
            if w.is_identity:
                choices.append([a])
            else:
                choices.append(sorted(b for u, b in relations[w] if u == a))
        rebuilt.update(product(*choices))
    if rebuilt != set(x.allowed):
        return None
    return relations


def closure_window(group: Group, window: Iterable[GroupElement]) -> Tuple[GroupElement, ...]:
    """Window closed under suffixes of geodesic spellings, identity included."""
    cells = {IDENTITY}
    for f in window:
        cells.update(group.suffixes(f))
    return make_support(cells)


def to_rauzy(
    x: Sft,
    margin: int = DEFAULT_MARGIN,
    cap: int = DEFAULT_FACTOR_ORDER_CAP,
    subgroup_depth: int = DEFAULT_SUBGROUP_SEARCH_DEPTH,
) -> RauzyRecoding:
    """Conjugate Rauzy graph of x; vertex v maps back to letter ``letters[v]``."""
    group = x.group
    one_step = _one_step_relations(x)
    if one_step is not None:
        centre = x.position[IDENTITY]
        used = sorted({row[centre] for row in x.allowed})
        index = {a: k for k, a in enumerate(used)}
        relations = {
            s: frozenset((index[u], index[v]) for u, v in edges if u in index and v in index)
            for s, edges in one_step.items()
        }
        graph = RauzyGraph.build(group, [x.alphabet[a] for a in used], relations)
        essential = essentialize(graph, cap)
        letters = tuple(x.alphabet.index(name) for name in essential.vertices)
        return RauzyRecoding(x, essential, (IDENTITY,), tuple((a,) for a in letters), letters)

    if not group.generates_group(x.window, subgroup_depth):
        raise UnsupportedInputError(
            "the window generates a proper subgroup; recoding needs <F> = G"
        )
    window = closure_window(group, x.window)
    rows = sorted(extendable_rows(x, window, margin))
    position = {g: k for k, g in enumerate(window)}
    relations = {}
    for s in group.generators:
        overlap = [
            (position[group.multiply(s, f)], position[f])
            for f in window
            if group.multiply(s, f) in position
        ]
        left: Dict[Row, List[int]] = {}
        right: Dict[Row, List[int]] = {}
        for v, row in enumerate(rows):
            left.setdefault(tuple(row[i] for i, _ in overlap), []).append(v)
            right.setdefault(tuple(row[j] for _, j in overlap), []).append(v)
        relations[s] = frozenset(
            (u, v) for key, us in left.items() for u in us for v in right.get(key, [])
        )
    names = [format_word(x.alphabet, row) for row in rows]
    graph = essentialize(RauzyGraph(group, tuple(names), tuple(relations[s] for s in group.generators)), cap)
    kept_rows = [rows[names.index(name)] for name in graph.vertices]
    centre = position[IDENTITY]
    letters = tuple(row[centre] for row in kept_rows)
    logger.debug(f"to_rauzy: window of {len(window)} cells, {len(graph.vertices)} vertices")
    return RauzyRecoding(x, graph, window, tuple(kept_rows), letters)


def rauzy_to_sft(r: RauzyGraph, cap: int = DEFAULT_FACTOR_ORDER_CAP) -> Sft:
    """Vertex shift of r as an SFT over the vertex names."""
    group = r.group
    window_parts: List[GroupElement] = [IDENTITY]
    for i, factor in enumerate(group.factors):
        if factor.is_finite:
            window_parts.extend(group.finite_factor_elements(i)[1:])
        else:
            window_parts.append(group.reduce([(i, 1)]))
    window = make_support(window_parts)
    position = {g: k for k, g in enumerate(window)}
    rows: Set[Row] = set()
    for v in range(len(r.vertices)):
        choices: List[List[Tuple[Tuple[int, int], ...]]] = []
        for i, factor in enumerate(group.factors):
            if factor.is_finite:
                elements = group.finite_factor_elements(i)
                choices.append([
                    tuple((position[h], c) for h, c in zip(elements[1:], coloring[1:]))
                    for coloring in coset_colorings(r, i, first=v, cap=cap)
                ])
            else:
                step = group.reduce([(i, 1)])
                choices.append([
                    ((position[step], w),) for u, w in sorted(r.edges(step)) if u == v
                ])
        for combo in product(*choices):
            row = [0] * len(window)
            row[position[IDENTITY]] = v
            for part in combo:
                for k, c in part:
                    row[k] = c
            rows.add(tuple(row))
    names = r.vertices if r.vertices else ("-",)
    return Sft(group, tuple(names), window, frozenset(rows))
