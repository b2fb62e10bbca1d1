"""
Isolation, NMC and minimality for subshifts over Z.

NMC (no middle cycle): no simple cycle of the graph has both an edge coming
in from outside and an edge going out. Under NMC every strongly connected
component of an essential graph is one simple cycle and a bi-infinite path
leaves at most one cycle and enters at most one, so the shift is a finite
union of orbits: one per cycle and one per transient path. That makes
isolation exact. A proper subshift with the same F-words exists iff removing
a single orbit that no other orbit accumulates on keeps every F-word.

Without NMC the tool refutes by search: forbidding one admissible word u
gives a proper sub-SFT, and every proper sub-SFT of window w lies inside one
that forbids a single w-word.
"""

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from lib.constants import DEFAULT_CAP, DEFAULT_CYCLE_VERTEX_CAP, DEFAULT_LENGTH, DEFAULT_WINDOW
from lib.errors import BudgetError, PreconditionError, StructuralError
from lib.logging_config import get_logger
from lib.models import Outcome, Verdict
from lib.utils import format_word

from services.codes import AlphabetMap
from services.patterns import Sft
from services.sofic import SoficPresentation, eventually_periodic, image_sofic, sofic_equal
from services.words import (
    Word,
    block_digraph,
    factors_of,
    higher_block,
    hull_words,
    language,
    occurs,
    require_integers,
    word_sft,
)

logger = get_logger("services.analysis")


@dataclass(frozen=True)
class NmcResult:
    holds: bool
    cycles_checked: int
    witness: Optional[Tuple[Hashable, ...]] = None


def nmc_check(graph: nx.DiGraph, cycle_cap: int = DEFAULT_CYCLE_VERTEX_CAP) -> NmcResult:
    """Look for a simple cycle with both an external in-edge and an external out-edge."""
    n = graph.number_of_nodes()
    if n > cycle_cap:
        raise BudgetError(f"{n} vertices exceed the cycle enumeration cap {cycle_cap}")
    checked = 0
    for cycle in nx.simple_cycles(graph):
        checked += 1
        members = set(cycle)
        entered = any(u not in members for v in cycle for u in graph.predecessors(v))
        left = any(w not in members for v in cycle for w in graph.successors(v))
        if entered and left:
            logger.debug(f"middle cycle found after {checked} cycles")
            return NmcResult(False, checked, tuple(cycle))
    return NmcResult(True, checked)


def cycle_components(graph: nx.DiGraph) -> Dict[Hashable, int]:
    """Component index of every vertex lying on a cycle."""
    components = sorted(
        sorted(c)
        for c in nx.strongly_connected_components(graph)
        if len(c) > 1 or graph.has_edge(next(iter(c)), next(iter(c)))
    )
    return {v: k for k, members in enumerate(components) for v in members}


def transient_paths(graph: nx.DiGraph) -> List[Tuple[Hashable, ...]]:
    """Paths leaving a cycle and entering another one, through off-cycle vertices only."""
    component = cycle_components(graph)
    found: List[Tuple[Hashable, ...]] = []

    def extend(path: Tuple[Hashable, ...]) -> None:
        for w in sorted(graph.successors(path[-1])):
            if w in component:
                found.append(path + (w,))
            elif w not in path:
                extend(path + (w,))

    for c in sorted(component):
        for w in sorted(graph.successors(c)):
            if w in component and component[w] == component[c]:
                continue
            if w in component:
                found.append((c, w))
            else:
                extend((c, w))
    return found


# ----------------------------------------------------------------------
# Orbits of an NMC graph
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    """A periodic orbit (``path`` is the cycle) or a transient one (``path`` joins two cycles)."""

    path: Tuple[Hashable, ...]
    left: Tuple[Hashable, ...] = ()
    right: Tuple[Hashable, ...] = ()

    @property
    def periodic(self) -> bool:
        return not self.left


def _cycle_order(graph: nx.DiGraph, component: Dict[Hashable, int], start: Hashable) -> Tuple[Hashable, ...]:
    order = [start]
    while True:
        nxt = next(w for w in sorted(graph.successors(order[-1])) if component.get(w) == component[start])
        if nxt == start:
            return tuple(order)
        order.append(nxt)


def orbits(graph: nx.DiGraph) -> List[Orbit]:
    """Every orbit of an essential NMC graph, cycles first."""
    component = cycle_components(graph)
    heads: Dict[int, Hashable] = {}
    for v in sorted(component):
        heads.setdefault(component[v], v)
    cycles = {k: _cycle_order(graph, component, v) for k, v in heads.items()}
    result = [Orbit(cycles[k]) for k in sorted(cycles)]
    for path in transient_paths(graph):
        left = cycles[component[path[0]]]
        right = cycles[component[path[-1]]]
        # rotate so the left period ends at the exit and the right one starts at the entry
        i, j = left.index(path[0]), right.index(path[-1])
        left = left[i + 1:] + left[:i + 1]
        right = right[j:] + right[:j]
        result.append(Orbit(path[1:-1], left, right))
    return result


def _labels(graph: nx.DiGraph, nodes: Sequence[Hashable]) -> List[int]:
    return [graph.nodes[v]["label"] for v in nodes]


def orbit_words(graph: nx.DiGraph, orbit: Orbit, n: int) -> Set[Word]:
    if n <= 0:
        return {()}
    if orbit.periodic:
        cycle = _labels(graph, orbit.path)
        return factors_of(cycle * (n // len(cycle) + 2), n)
    left = _labels(graph, orbit.left)
    right = _labels(graph, orbit.right)
    spine = (
        left * (n // len(left) + 2)
        + _labels(graph, orbit.path)
        + right * (n // len(right) + 2)
    )
    return factors_of(spine, n)


def describe_orbit(graph: nx.DiGraph, alphabet: Sequence[str], orbit: Orbit) -> str:
    def word(nodes: Sequence[Hashable]) -> str:
        return format_word(alphabet, _labels(graph, nodes))

    if orbit.periodic:
        return f"({word(orbit.path)})^inf"
    middle = word(orbit.path)
    return f"({word(orbit.left)})^inf {middle + ' ' if middle else ''}({word(orbit.right)})^inf"


def _touches(transient: Orbit, cycle: Orbit) -> bool:
    members = set(cycle.path)
    return bool(members & set(transient.left)) or bool(members & set(transient.right))


def removable_orbits(all_orbits: Sequence[Orbit]) -> List[Orbit]:
    """Orbits whose removal leaves a closed set: transient ones and untouched cycles."""
    transient = [o for o in all_orbits if not o.periodic]
    return [
        o for o in all_orbits
        if not o.periodic or not any(_touches(t, o) for t in transient)
    ]


# ----------------------------------------------------------------------
# Isolation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A proper sub-SFT of x forbidding ``word`` with the same F-words."""

    word: Word
    sft: Sft
    distinguishing_length: int


def _sub_sft(x: Sft, word: Word) -> Sft:
    m, _ = hull_words(x)
    width = max(m, len(word))
    rows = [w for w in language(x, width) if not occurs(word, w)]
    return word_sft(x.alphabet, width, rows)


def find_witness(
    x: Sft, f_len: int, search_window: int = DEFAULT_WINDOW, distinguish_len: int = DEFAULT_LENGTH
) -> Optional[Witness]:
    """First single-word removal (shortest, then lexicographic) keeping every f_len-word."""
    target = language(x, f_len)
    for width in range(f_len + 1, min(search_window, distinguish_len) + 1):
        candidates = language(x, width)
        logger.debug(f"refutation search: {len(candidates)} words of length {width}")
        for u in candidates:
            y = _sub_sft(x, u)
            if language(y, f_len) != target:
                continue
            n = next(k for k in range(f_len + 1, width + 1) if len(language(y, k)) != len(language(x, k)))
            return Witness(u, y, n)
    return None


def _graph_of(x: Sft) -> nx.DiGraph:
    require_integers(x)
    graph = block_digraph(x)
    if graph.number_of_nodes() == 0:
        raise PreconditionError("the SFT is empty")
    return graph


def _orbit_analysis(
    graph: nx.DiGraph, x: Sft, f_len: int
) -> Tuple[Optional[Tuple[Orbit, Word]], int, int]:
    """(removable orbit with its missing word, or None; orbit count; removable count)."""
    all_orbits = orbits(graph)
    target = set(language(x, f_len))
    candidates = removable_orbits(all_orbits)
    for orbit in candidates:
        rest = [o for o in all_orbits if o != orbit]
        kept: Set[Word] = set()
        for o in rest:
            kept |= orbit_words(graph, o, f_len)
        if kept != target:
            continue
        n = f_len + 1
        while True:
            others: Set[Word] = set()
            for o in rest:
                others |= orbit_words(graph, o, n)
            lost = sorted(orbit_words(graph, orbit, n) - others)
            if lost:
                return (orbit, lost[0]), len(all_orbits), len(candidates)
            n += 1
    return None, len(all_orbits), len(candidates)


def isolated_check(
    x: Sft,
    f_radius: int,
    search_window: int = DEFAULT_WINDOW,
    distinguish_len: int = DEFAULT_LENGTH,
    cap: int = DEFAULT_CAP,
    cycle_cap: int = DEFAULT_CYCLE_VERTEX_CAP,
) -> Verdict:
    """Whether some proper subshift shares the {0..f_radius}-words of x."""
    if f_radius < 0:
        raise StructuralError("f radius must be non-negative")
    base = _graph_of(x)
    f_len = f_radius + 1
    bounds = {
        "F": f"{{0..{f_radius}}}",
        "search window": search_window,
        "distinguishing length": distinguish_len,
        "recoding cap": cap,
    }
    for level in range(1, cap + 1):
        graph = higher_block(base, level)
        try:
            nmc = nmc_check(graph, cycle_cap)
        except BudgetError as e:
            logger.warning(f"NMC search stopped at level {level}: {e}")
            break
        if not nmc.holds:
            continue
        found, count, removable = _orbit_analysis(graph, x, f_len)
        if found is None:
            return Verdict(
                status="isolated-certified",
                outcome=Outcome.POSITIVE,
                certificate={
                    "nmc": f"holds at recoding level {level}",
                    "orbits": count,
                    "removable orbits": removable,
                    "each removal loses": f"a word of length {f_len}",
                },
                bounds=bounds,
            )
        orbit, word = found
        y = _sub_sft(x, word)
        return Verdict(
            status="not-isolated",
            outcome=Outcome.NEGATIVE,
            certificate={
                "removed orbit": describe_orbit(graph, x.alphabet, orbit),
                "witness": f"sub-SFT forbidding {format_word(x.alphabet, word)}",
                "witness window": len(y.window),
                "distinguishing word": format_word(x.alphabet, word),
            },
            bounds=bounds,
        )
    witness = find_witness(x, f_len, search_window, distinguish_len)
    if witness is not None:
        return Verdict(
            status="not-isolated",
            outcome=Outcome.NEGATIVE,
            certificate={
                "witness": f"sub-SFT forbidding {format_word(x.alphabet, witness.word)}",
                "witness window": len(witness.sft.window),
                "same F-words": f"{len(language(x, f_len))} words of length {f_len}",
                "distinguishing length": witness.distinguishing_length,
            },
            bounds=bounds,
        )
    logger.warning("isolation undecided within the search bounds")
    return Verdict(
        status="unknown",
        outcome=Outcome.UNKNOWN,
        certificate={"nmc": "not established", "refutation": "no witness within bounds"},
        bounds=bounds,
    )


def projective_isolation(
    y: Sft,
    m: AlphabetMap,
    target: SoficPresentation,
    f_radius: int,
    search_window: int = DEFAULT_WINDOW,
    distinguish_len: int = DEFAULT_LENGTH,
    cap: int = DEFAULT_CAP,
    cycle_cap: int = DEFAULT_CYCLE_VERTEX_CAP,
) -> Verdict:
    """Isolated y whose image under the 1-block map m presents ``target``."""
    isolation = isolated_check(y, f_radius, search_window, distinguish_len, cap, cycle_cap)
    same_image = sofic_equal(image_sofic(y, m), target)
    certificate = {"isolation": isolation.status, "image equals target": "yes" if same_image else "no"}
    if isolation.positive and same_image:
        return Verdict(status="projectively-isolated", outcome=Outcome.POSITIVE, certificate=certificate)
    if isolation.outcome == Outcome.NEGATIVE or not same_image:
        return Verdict(status="not-certified", outcome=Outcome.NEGATIVE, certificate=certificate)
    return Verdict(status="unknown", outcome=Outcome.UNKNOWN, certificate=certificate)


# ----------------------------------------------------------------------
# Minimality
# ----------------------------------------------------------------------


def _is_single_cycle(graph: nx.DiGraph) -> bool:
    return (
        graph.number_of_nodes() > 0
        and graph.number_of_edges() == graph.number_of_nodes()
        and nx.is_strongly_connected(graph)
    )


def _shortest_cycle(graph: nx.DiGraph) -> Tuple[Hashable, ...]:
    best: Optional[List[Hashable]] = None
    for v in sorted(graph.nodes):
        for w in sorted(graph.successors(v)):
            try:
                path = [v] + nx.shortest_path(graph, w, v)[:-1]
            except nx.NetworkXNoPath:
                continue
            if best is None or len(path) < len(best):
                best = path
    return tuple(best or ())


def _forced_point(graph: nx.DiGraph, cylinder: Word) -> Optional[Tuple[List, List, List]]:
    """(left period, middle, right period) vertices when ``cylinder`` pins down one point."""
    starts = [v for v in graph.nodes if graph.nodes[v]["label"] == cylinder[0]]
    paths = [[v] for v in starts]
    for a in cylinder[1:]:
        paths = [p + [w] for p in paths for w in graph.successors(p[-1]) if graph.nodes[w]["label"] == a]
    if len(paths) != 1:
        return None
    path = paths[0]
    before: List[Hashable] = []
    v = path[0]
    while True:
        preds = list(graph.predecessors(v))
        if len(preds) != 1:
            return None
        v = preds[0]
        if v in before or v in path:
            break
        before.insert(0, v)
    loop_at = v
    after: List[Hashable] = []
    v = path[-1]
    while True:
        succ = list(graph.successors(v))
        if len(succ) != 1:
            return None
        v = succ[0]
        if v in after or v in path:
            break
        after.append(v)
    enter_at = v
    chain = before + path + after
    i = chain.index(loop_at)
    j = chain.index(enter_at)
    if i >= j:
        # periodic point
        return chain[j:], [], chain[j:]
    # the left period ends at loop_at, the right period starts at enter_at
    return chain[:i + 1], chain[i + 1:j], chain[j:]


def minimal_check(
    x: Sft,
    cylinders: Optional[Sequence[Word]] = None,
    search_window: int = DEFAULT_WINDOW,
) -> Verdict:
    """Plain minimality, or minimality relative to a family of cylinders at 0."""
    graph = _graph_of(x)
    if not cylinders:
        if _is_single_cycle(graph):
            return Verdict(
                status="minimal",
                outcome=Outcome.POSITIVE,
                certificate={"orbit": f"single periodic orbit of period {graph.number_of_nodes()}"},
            )
        cycle = _shortest_cycle(graph)
        return Verdict(
            status="not-minimal",
            outcome=Outcome.NEGATIVE,
            certificate={"proper subshift": f"({format_word(x.alphabet, _labels(graph, cycle))})^inf"},
        )
    for c in cylinders:
        if not c or tuple(c) not in set(language(x, len(c))):
            raise StructuralError(f"cylinder {format_word(x.alphabet, c)} is not a word of the SFT")
    bounds = {"search window": search_window, "cylinders": len(cylinders)}
    for width in range(1, search_window + 1):
        for u in language(x, width):
            if any(occurs(u, c) for c in cylinders):
                continue
            y = _sub_sft(x, u)
            if all(tuple(c) in set(language(y, len(c))) for c in cylinders):
                return Verdict(
                    status="not-minimal",
                    outcome=Outcome.NEGATIVE,
                    certificate={"witness": f"sub-SFT forbidding {format_word(x.alphabet, u)} meets every cylinder"},
                    bounds=bounds,
                )
    whole = image_sofic(x, AlphabetMap.identity(x.alphabet))
    for c in cylinders:
        point = _forced_point(graph, tuple(c))
        if point is None:
            continue
        left, middle, right = (_labels(graph, part) for part in point)
        closure = eventually_periodic(x.alphabet, left, middle, right)
        if sofic_equal(closure, whole):
            return Verdict(
                status="minimal",
                outcome=Outcome.POSITIVE,
                certificate={
                    "forcing cylinder": format_word(x.alphabet, c),
                    "forced point": f"({format_word(x.alphabet, left)})^inf "
                    f"{format_word(x.alphabet, middle)} ({format_word(x.alphabet, right)})^inf",
                    "orbit closure": "equals the whole shift",
                },
                bounds=bounds,
            )
    return Verdict(
        status="unknown",
        outcome=Outcome.UNKNOWN,
        certificate={"refutation": "no witness within bounds", "forcing": "no cylinder forces a dense point"},
        bounds=bounds,
    )
