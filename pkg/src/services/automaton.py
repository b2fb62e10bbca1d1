"""
Coloring automata and their tracked subshifts.

A coloring automaton Omega: S x A -> A colors a group outward from a start
element. Each position reached from h via s gets Omega(s, color(h)); a whole
finite-factor coset is colored from its entry element in one sweep. The
tracked letter at a position records, for every generator, whether that
neighbor is the one it was reached from (<), one it colors (>), or a sibling
in the same finite coset (-). The start position is all >.

The tracked SFT has window {1} u S and allows exactly the window patterns
that occur in runs. Its configurations are either one run (a single start)
or a limit of runs (exactly one < everywhere), and its image under the color
projection is the subshift the automaton generates.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from lib.constants import (
    ARROW_BACK,
    ARROW_FORWARD,
    ARROW_NONE,
    DEFAULT_CAP,
    DEFAULT_CYCLE_VERTEX_CAP,
    DEFAULT_FACTOR_ORDER_CAP,
    DEFAULT_MARGIN,
    DEFAULT_SAMPLE_RADIUS,
    TRACK_SEPARATOR,
)
from lib.errors import (
    BudgetError,
    DegenerateInputError,
    NotApplicableError,
    PreconditionError,
    StructuralError,
    UnsupportedInputError,
)
from lib.logging_config import get_logger
from lib.models import Outcome, Verdict
from lib.utils import format_word

from services.analysis import cycle_components, nmc_check, transient_paths
from services.codes import AlphabetMap
from services.extension import extendable_rows
from services.group import IDENTITY, Group, GroupElement, free_product_group, integers, make_support
from services.patterns import Row, Sft
from services.products import pair_names, restricted_pairs
from services.words import block_digraph, higher_block, require_integers

logger = get_logger("services.automaton")

TrackedLetter = Tuple[int, str]


@dataclass(frozen=True)
class ColoringAutomaton:
    """Omega as one row per generator (in ``group.generators`` order)."""

    group: Group
    colors: Tuple[str, ...]
    rule: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if not self.colors:
            raise StructuralError("an automaton needs at least one color")
        if len(set(self.colors)) != len(self.colors):
            raise StructuralError("colors must be distinct")
        n = len(self.colors)
        if len(self.rule) != len(self.group.generators) or any(len(row) != n for row in self.rule):
            raise StructuralError("Omega must be defined on every generator and color")
        if any(not 0 <= b < n for row in self.rule for b in row):
            raise StructuralError("Omega produces a color outside the color set")

    @classmethod
    def from_mapping(
        cls,
        group: Group,
        colors: Sequence[str],
        mapping: Mapping[Tuple[GroupElement, int], int],
    ) -> "ColoringAutomaton":
        rows = []
        for s in group.generators:
            row = []
            for a in range(len(colors)):
                if (s, a) not in mapping:
                    raise StructuralError(
                        f"Omega is not total: no value for ({group.format_element(s)}, {colors[a]})"
                    )
                row.append(mapping[(s, a)])
            rows.append(tuple(row))
        return cls(group, tuple(colors), tuple(rows))

    @cached_property
    def generator_index(self) -> Dict[GroupElement, int]:
        return {s: k for k, s in enumerate(self.group.generators)}

    def omega(self, s: GroupElement, a: int) -> int:
        return self.rule[self.generator_index[s]][a]

    def describe(self) -> List[str]:
        fmt = self.group.format_element
        return [
            f"Omega {fmt(s)} {self.colors[a]} -> {self.colors[b]}"
            for s, row in zip(self.group.generators, self.rule)
            for a, b in enumerate(row)
        ]


@dataclass(frozen=True)
class LetteredAutomaton:
    """An automaton together with the letter map from its colors to a target alphabet."""

    automaton: ColoringAutomaton
    letters: AlphabetMap
    level: int = 1


# ----------------------------------------------------------------------
# Runs
# ----------------------------------------------------------------------


@dataclass
class TrackedConfig:
    """A run: colors and arrow words on start . ball(radius)."""

    automaton: ColoringAutomaton
    start: GroupElement
    radius: int
    colors: Dict[GroupElement, int] = field(default_factory=dict)
    arrows: Dict[GroupElement, str] = field(default_factory=dict)

    @property
    def domain(self) -> List[GroupElement]:
        return sorted(self.colors)

    def letter(self, g: GroupElement) -> TrackedLetter:
        return self.colors[g], self.arrows[g]


def arrival(group: Group, u: GroupElement) -> Tuple[GroupElement, GroupElement]:
    """(parent, s) with u = parent * s, s in S, |parent| = |u| - 1."""
    *head, (i, v) = u.syllables
    if group.factors[i].is_finite:
        return GroupElement(tuple(head)), GroupElement(((i, v),))
    step = 1 if v > 0 else -1
    parent = group.reduce(list(head) + [(i, v - step)])
    return parent, GroupElement(((i, step),))


def arrow_word(group: Group, s: GroupElement) -> str:
    """Arrow word of a position reached via s."""
    back = group.inverse(s)
    return "".join(
        ARROW_BACK if t == back
        else ARROW_NONE if group.same_finite_factor(t, s)
        else ARROW_FORWARD
        for t in group.generators
    )


def run(a: ColoringAutomaton, start: GroupElement, color: int, radius: int) -> TrackedConfig:
    """Color start . ball(radius) from ``color`` at ``start``."""
    if not 0 <= color < len(a.colors):
        raise StructuralError(f"color index {color} is not a color of the automaton")
    group = a.group
    cfg = TrackedConfig(a, start, radius)
    cfg.colors[start] = color
    cfg.arrows[start] = ARROW_FORWARD * len(group.generators)
    relative = sorted(group.ball(radius), key=lambda u: (group.word_length(u), u))
    for u in relative[1:]:
        parent, s = arrival(group, u)
        g = group.multiply(start, u)
        cfg.colors[g] = a.omega(s, cfg.colors[group.multiply(start, parent)])
        cfg.arrows[g] = arrow_word(group, s)
    return cfg


def verify_run(cfg: TrackedConfig) -> List[Tuple[GroupElement, str]]:
    """Positions where the tracking rules fail, with a reason each."""
    a = cfg.automaton
    group = a.group
    gens = group.generators
    fmt = group.format_element
    problems: List[Tuple[GroupElement, str]] = []
    for g in cfg.domain:
        word = cfg.arrows[g]
        backs = [k for k, c in enumerate(word) if c == ARROW_BACK]
        if len(backs) > 1:
            problems.append((g, "more than one back arrow"))
            continue
        if not backs:
            if set(word) != {ARROW_FORWARD}:
                problems.append((g, "start position must point forward everywhere"))
            continue
        t = gens[backs[0]]
        s = group.inverse(t)
        if word != arrow_word(group, s):
            problems.append((g, f"arrows do not match arrival via {fmt(s)}"))
        parent = group.multiply(g, t)
        if parent in cfg.colors:
            if cfg.colors[g] != a.omega(s, cfg.colors[parent]):
                problems.append((g, f"color is not Omega({fmt(s)}, parent color)"))
            if cfg.arrows[parent][gens.index(s)] != ARROW_FORWARD:
                problems.append((g, "parent does not point forward to this position"))
        for k, c in enumerate(word):
            n = group.multiply(g, gens[k])
            if c == ARROW_BACK or n not in cfg.arrows:
                continue
            expected = ARROW_BACK if c == ARROW_FORWARD else ARROW_NONE
            if cfg.arrows[n][gens.index(group.inverse(gens[k]))] != expected:
                problems.append((g, f"neighbor via {fmt(gens[k])} disagrees on the arrow between them"))
    return problems


# ----------------------------------------------------------------------
# Tracked SFT
# ----------------------------------------------------------------------


def tracked_name(colors: Sequence[str], letter: TrackedLetter) -> str:
    return f"{colors[letter[0]]}{TRACK_SEPARATOR}{letter[1]}"


def split_tracked_name(name: str) -> Tuple[str, str]:
    color, sep, arrows = name.rpartition(TRACK_SEPARATOR)
    if not sep:
        raise StructuralError(f"{name!r} is not a tracked letter (color{TRACK_SEPARATOR}arrows)")
    return color, arrows


@dataclass(frozen=True)
class TrackedSft:
    """The tracked SFT of an automaton with its sampling evidence."""

    automaton: ColoringAutomaton
    sft: Sft
    letters: Tuple[TrackedLetter, ...]
    sample_radius: int
    stabilized_at: Optional[int]

    @property
    def letter_map(self) -> AlphabetMap:
        """B -> A, the color coordinate."""
        return AlphabetMap(self.sft.alphabet, self.automaton.colors, tuple(c for c, _ in self.letters))


def _rows_by_depth(
    a: ColoringAutomaton, window: Sequence[GroupElement], radius: int
) -> Dict[Tuple[TrackedLetter, ...], int]:
    """Window rows of runs from the identity, each with the least radius showing it."""
    group = a.group
    found: Dict[Tuple[TrackedLetter, ...], int] = {}
    for color in range(len(a.colors)):
        cfg = run(a, IDENTITY, color, radius)
        for g in cfg.domain:
            cells = [group.multiply(g, w) for w in window]
            if not all(c in cfg.colors for c in cells):
                continue
            depth = max(group.word_length(c) for c in cells)
            row = tuple(cfg.letter(c) for c in cells)
            if row not in found or depth < found[row]:
                found[row] = depth
    return found


def tilde_sft(a: ColoringAutomaton, sample_radius: int = DEFAULT_SAMPLE_RADIUS) -> TrackedSft:
    """Tracked SFT sampled from runs at every color up to ``sample_radius``.

    Rows at far positions of a run are the rows of the limit configurations
    (start at infinity), so positions away from the start already supply the
    exactly-one-< patterns.
    """
    if sample_radius < 1:
        raise StructuralError("sample radius must be at least 1")
    group = a.group
    window = make_support([IDENTITY] + list(group.generators))
    found = _rows_by_depth(a, window, sample_radius)
    final = set(found)
    stabilized_at = None
    for r in range(1, sample_radius):
        if {row for row, depth in found.items() if depth <= r} == final:
            stabilized_at = r
            break
    if stabilized_at is None:
        logger.warning(f"tracked patterns still growing at sample radius {sample_radius}")
    letters = tuple(sorted({letter for row in final for letter in row}))
    index = {letter: k for k, letter in enumerate(letters)}
    names = tuple(tracked_name(a.colors, letter) for letter in letters)
    rows = frozenset(tuple(index[letter] for letter in row) for row in final)
    return TrackedSft(a, Sft(group, names, window, rows), letters, sample_radius, stabilized_at)


def _arrow_words(x: Sft) -> List[str]:
    return [split_tracked_name(name)[1] for name in x.alphabet]


def _describe_row(x: Sft, support: Sequence[GroupElement], row: Row) -> str:
    fmt = x.group.format_element
    return " ".join(f"{x.alphabet[a]}@{fmt(g)}" for g, a in zip(support, row))


def dichotomy_check(
    x: Sft, radius: int, margin: int = DEFAULT_MARGIN
) -> Verdict:
    """Every admissible ball pattern has at most one start and one < elsewhere."""
    words = _arrow_words(x)
    support = x.group.ball(radius)
    rows = extendable_rows(x, support, margin)
    bounds = {"radius": radius, "margin": margin}
    for row in sorted(rows):
        starts = 0
        reason = None
        for letter in row:
            word = words[letter]
            backs = word.count(ARROW_BACK)
            if backs == 0 and set(word) <= {ARROW_FORWARD}:
                starts += 1
            elif backs != 1:
                reason = "position with neither all > nor exactly one <"
                break
        if reason is None and starts > 1:
            reason = "two start positions"
        if reason is not None:
            return Verdict(
                status="dichotomy-fails",
                outcome=Outcome.NEGATIVE,
                certificate={"reason": reason, "witness": _describe_row(x, support, row)},
                bounds=bounds,
            )
    return Verdict(
        status="dichotomy-holds",
        outcome=Outcome.POSITIVE,
        certificate={"patterns checked": len(rows)},
        bounds=bounds,
    )


def isolation_certificate(t: TrackedSft) -> Verdict:
    """Window patterns reachable from the start patterns along > arrows.

    Any subshift with the same window patterns contains every start pattern,
    hence every run. When the closure of the start patterns is the whole
    allowed set, the tracked SFT is isolated at its window.
    """
    x = t.sft
    group = x.group
    gens = group.generators
    window = x.window
    position = x.position
    words = _arrow_words(x)
    centre = position[IDENTITY]
    allowed = sorted(x.allowed)
    overlaps = {}
    for k, s in enumerate(gens):
        overlaps[k] = [
            (position[group.multiply(s, f)], position[f])
            for f in window
            if group.multiply(s, f) in position
        ]
    back_slot = {k: gens.index(group.inverse(s)) for k, s in enumerate(gens)}
    starts = [row for row in allowed if set(words[row[centre]]) <= {ARROW_FORWARD}]
    reached: Set[Row] = set(starts)
    frontier = list(starts)
    while frontier:
        row = frontier.pop()
        for k, c in enumerate(words[row[centre]]):
            if c != ARROW_FORWARD:
                continue
            for candidate in allowed:
                if candidate in reached:
                    continue
                if words[candidate[centre]][back_slot[k]] != ARROW_BACK:
                    continue
                if all(row[i] == candidate[j] for i, j in overlaps[k]):
                    reached.add(candidate)
                    frontier.append(candidate)
    missing = [row for row in allowed if row not in reached]
    certificate = {
        "start patterns": len(starts),
        "allowed patterns": len(allowed),
        "reached": len(reached),
    }
    if missing:
        certificate["unreached"] = _describe_row(x, window, missing[0])
        return Verdict(status="certificate-incomplete", outcome=Outcome.UNKNOWN, certificate=certificate)
    return Verdict(status="isolation-certified", outcome=Outcome.POSITIVE, certificate=certificate)


@dataclass(frozen=True)
class GeneratedPatterns:
    """Color patterns of the generated subshift on ball(radius), sampled from runs."""

    support: Tuple[GroupElement, ...]
    rows: frozenset
    sample_radius: int
    stabilized: bool


def generated_patterns(
    a: ColoringAutomaton, radius: int, sample_radius: int
) -> GeneratedPatterns:
    group = a.group
    support = group.ball(radius)
    found = {}
    for color in range(len(a.colors)):
        cfg = run(a, IDENTITY, color, sample_radius)
        for g in cfg.domain:
            cells = [group.multiply(g, f) for f in support]
            if not all(c in cfg.colors for c in cells):
                continue
            depth = max(group.word_length(c) for c in cells)
            row = tuple(cfg.colors[c] for c in cells)
            found[row] = min(depth, found.get(row, depth))
    rows = frozenset(found)
    shallower = {row for row, depth in found.items() if depth < sample_radius}
    return GeneratedPatterns(support, rows, sample_radius, shallower == rows)


def projection_check(
    t: TrackedSft, radius: int, margin: int = DEFAULT_MARGIN, sample_radius: Optional[int] = None
) -> Verdict:
    """Color projection of the tracked ball patterns against the generated ones."""
    a = t.automaton
    support = a.group.ball(radius)
    depth = sample_radius if sample_radius is not None else t.sample_radius + radius
    projected = {t.letter_map.apply(row) for row in extendable_rows(t.sft, support, margin)}
    generated = generated_patterns(a, radius, depth)
    bounds = {"radius": radius, "margin": margin, "sample radius": depth}
    certificate = {"tracked image": len(projected), "generated": len(generated.rows)}
    if projected == set(generated.rows):
        return Verdict(status="projection-onto", outcome=Outcome.POSITIVE, certificate=certificate, bounds=bounds)
    missing = sorted(set(generated.rows) - projected)
    extra = sorted(projected - set(generated.rows))
    if missing:
        certificate["not covered"] = format_word(a.colors, missing[0])
    if extra:
        certificate["not generated"] = format_word(a.colors, extra[0])
    return Verdict(status="projection-mismatch", outcome=Outcome.NEGATIVE, certificate=certificate, bounds=bounds)


# ----------------------------------------------------------------------
# Constructions
# ----------------------------------------------------------------------


def case1_finite_automaton(x: Sft, cap: int = DEFAULT_FACTOR_ORDER_CAP) -> LetteredAutomaton:
    """Over a finite group: colors are the configurations b, Omega(g, b) = g^-1 b."""
    group = x.group
    if not group.is_finite:
        raise UnsupportedInputError("the finite construction needs a finite group")
    order = group.factors[0].order or 0
    if order > cap:
        raise BudgetError(f"group of order {order} exceeds the cap {cap}")
    elements = make_support(group.finite_factor_elements(0))
    configurations = sorted(extendable_rows(x, elements, 0))
    if not configurations:
        raise DegenerateInputError("the SFT has no configurations")
    index = {row: k for k, row in enumerate(configurations)}
    place = {g: k for k, g in enumerate(elements)}
    rule = []
    for s in group.generators:
        moved = [place[group.multiply(s, h)] for h in elements]
        rule.append(tuple(index[tuple(row[m] for m in moved)] for row in configurations))
    names = tuple(format_word(x.alphabet, row) for row in configurations)
    automaton = ColoringAutomaton(group, names, tuple(rule))
    identity_slot = place[IDENTITY]
    letters = AlphabetMap(names, x.alphabet, tuple(row[identity_slot] for row in configurations))
    return LetteredAutomaton(automaton, letters)


def _degree_condition(graph: nx.DiGraph) -> bool:
    return not any(graph.in_degree(v) > 1 and graph.out_degree(v) > 1 for v in graph.nodes)


def _cycle_rule(graph: nx.DiGraph) -> Tuple[Dict, Dict]:
    """Omega(1, .) and Omega(-1, .): stay on the cycle when on one, else the least neighbor."""
    component = cycle_components(graph)
    forward, backward = {}, {}
    for v in sorted(graph.nodes):
        succ = sorted(graph.successors(v))
        pred = sorted(graph.predecessors(v))
        if v in component:
            succ = [w for w in succ if component.get(w) == component[v]]
            pred = [w for w in pred if component.get(w) == component[v]]
        forward[v] = succ[0]
        backward[v] = pred[0]
    return forward, backward


def _covered(path: Sequence, forward: Mapping, backward: Mapping) -> bool:
    """Whether the run from some vertex of ``path`` follows it to both cycles."""
    for i in range(len(path)):
        right = all(forward[path[j]] == path[j + 1] for j in range(i, len(path) - 1))
        left = all(backward[path[j]] == path[j - 1] for j in range(1, i + 1))
        if right and left:
            return True
    return False


def case2_nmc_automaton(
    graph: nx.DiGraph,
    alphabet: Sequence[str],
    cap: int = DEFAULT_CAP,
    cycle_cap: int = DEFAULT_CYCLE_VERTEX_CAP,
) -> LetteredAutomaton:
    """Automaton over Z whose generated subshift is the vertex shift's letter image.

    Higher-block levels 1..cap are tried until NMC, the degree condition and
    path coverage (every transient path is the run from one of its vertices)
    all hold.
    """
    if graph.number_of_nodes() == 0:
        raise PreconditionError("the graph has no bi-infinite paths")
    group = integers()
    minus, plus = group.from_int(-1), group.from_int(1)
    nmc_seen = False
    for level in range(1, cap + 1):
        h = higher_block(graph, level)
        if not nmc_check(h, cycle_cap).holds:
            logger.debug(f"level {level}: middle cycle present")
            continue
        nmc_seen = True
        if not _degree_condition(h):
            logger.debug(f"level {level}: degree condition fails")
            continue
        forward, backward = _cycle_rule(h)
        if not all(_covered(p, forward, backward) for p in transient_paths(h)):
            logger.debug(f"level {level}: some transient path is not a run")
            continue
        nodes = sorted(h.nodes)
        index = {v: k for k, v in enumerate(nodes)}
        names = tuple(str(h.nodes[v].get("name", v)) for v in nodes)
        mapping = {}
        for v in nodes:
            mapping[(plus, index[v])] = index[forward[v]]
            mapping[(minus, index[v])] = index[backward[v]]
        automaton = ColoringAutomaton.from_mapping(group, names, mapping)
        letters = AlphabetMap(names, tuple(alphabet), tuple(h.nodes[v]["label"] for v in nodes))
        logger.info(f"NMC automaton built at recoding level {level}")
        return LetteredAutomaton(automaton, letters, level)
    if not nmc_seen:
        raise NotApplicableError(f"a middle cycle persists at every recoding level up to {cap}")
    raise BudgetError(f"no recoding level up to {cap} satisfies the degree and path conditions")


def case2_for_sft(
    x: Sft, cap: int = DEFAULT_CAP, cycle_cap: int = DEFAULT_CYCLE_VERTEX_CAP
) -> LetteredAutomaton:
    require_integers(x)
    return case2_nmc_automaton(block_digraph(x), x.alphabet, cap, cycle_cap)


def product_automaton(
    ax: ColoringAutomaton, phi0: AlphabetMap, ay: ColoringAutomaton, psi0: AlphabetMap
) -> LetteredAutomaton:
    """Automaton over G * H on the restricted product of the color sets.

    A step inside G moves the first coordinate by Omega_X and pairs it with
    the least compatible second coordinate; steps inside H are symmetric.
    """
    if phi0.source != ax.colors or psi0.source != ay.colors:
        raise StructuralError("maps must start at the color sets of the two automata")
    pairs = restricted_pairs(phi0, psi0)
    if not (phi0.is_surjective and psi0.is_surjective):
        raise PreconditionError("the maps to the common alphabet must be surjective")
    group = free_product_group(ax.group, ay.group)
    shift = len(ax.group.factors)
    index = {pair: k for k, pair in enumerate(pairs)}
    least_right = {a: min(psi0.preimages(a)) for a in range(len(phi0.target))}
    least_left = {a: min(phi0.preimages(a)) for a in range(len(phi0.target))}
    rule = []
    for s in group.generators:
        (i, v), = s.syllables
        row = []
        for b, c in pairs:
            if i < shift:
                b2 = ax.omega(s, b)
                row.append(index[(b2, least_right[phi0(b2)])])
            else:
                c2 = ay.omega(GroupElement(((i - shift, v),)), c)
                row.append(index[(least_left[psi0(c2)], c2)])
        rule.append(tuple(row))
    names = pair_names(phi0, psi0, pairs)
    automaton = ColoringAutomaton(group, names, tuple(rule))
    letters = AlphabetMap(names, phi0.target, tuple(phi0(b) for b, _ in pairs))
    return LetteredAutomaton(automaton, letters)
