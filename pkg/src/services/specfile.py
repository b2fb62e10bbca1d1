"""
The .sds spec dialect.

A file is a sequence of sections ``[kind name]``; ``#`` starts a comment.
Section names are unique across kinds and may be referenced before they are
defined. Objects are built on first use and cached; derived automata
(``case1:``, ``case2:``, ``product:``) are only constructed when asked for,
so a file parses even if one of its constructions does not apply.

    [group G]
    Z * cyclic 3                 # or one factor per line; table N c11 c12 ...

    [sft golden]
    group: Z                     # a group section name or an inline expression
    alphabet: 0 1
    window: 0 1
    forbidden:                   # or allowed:, one pattern per line
    11                           # word laid on the window in listed order
    1@0 1@1                      # or letter@element pairs

    [automaton swap]
    group: Z
    colors: a b
    Omega 1 a -> b

    [map p0]
    source: -1 0 1
    target: 0 1
    -1 -> 0

    [presentation even]
    labels: 0 1
    vertices: 2
    edge 0 0 0

    [system chain]
    level X1
    level X2 p                   # bonding map X2 -> X1, or identity

    [pseudo-orbit walk]
    sft: golden
    coarse: 1
    blocks:
    01
"""

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from lib.constants import SECTION_KINDS
from lib.errors import SpecSyntaxError, StructuralError
from lib.logging_config import get_logger
from lib.utils import format_word, parse_word, strip_comment

from services.automaton import (
    ColoringAutomaton,
    LetteredAutomaton,
    case1_finite_automaton,
    case2_for_sft,
    product_automaton,
)
from services.codes import AlphabetMap
from services.group import FactorSpec, Group, GroupElement, make_support
from services.patterns import Sft
from services.shadowing import InverseSystem, PseudoOrbit
from services.sofic import SoficPresentation

logger = get_logger("services.specfile")

HEADER = re.compile(r"^\[\s*([a-z-]+)\s+([^\]\s]+)\s*\]$")

Line = Tuple[int, str]


@dataclass
class Section:
    kind: str
    name: str
    line: int
    body: List[Line] = field(default_factory=list)


@dataclass
class Fields:
    values: Dict[str, Line]
    tail_key: Optional[str]
    tail: List[Line]
    other: List[Line]

    def value(self, key: str) -> Optional[str]:
        return self.values[key][1] if key in self.values else None

    def line(self, key: str, default: int) -> int:
        return self.values[key][0] if key in self.values else default


def _fields(section: Section, keys: Sequence[str], tail_keys: Sequence[str] = ()) -> Fields:
    """Split a body into ``key: value`` lines, a trailing block and everything else."""
    out = Fields({}, None, [], [])
    for ln, text in section.body:
        if out.tail_key is not None:
            out.tail.append((ln, text))
            continue
        key, sep, value = text.partition(":")
        key = key.strip()
        if sep and key in tail_keys and not value.strip():
            out.tail_key = key
        elif sep and key in keys:
            if key in out.values:
                raise SpecSyntaxError(f"duplicate {key!r} line", ln)
            out.values[key] = (ln, value.strip())
        else:
            out.other.append((ln, text))
    return out


def _require(section: Section, f: Fields, *keys: str) -> None:
    for key in keys:
        if key not in f.values:
            raise SpecSyntaxError(f"{section.kind} {section.name!r} has no {key!r} line", section.line)


def _no_other(f: Fields) -> None:
    if f.other:
        ln, text = f.other[0]
        raise SpecSyntaxError(f"unexpected line {text!r}", ln)


def _int(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecSyntaxError(f"expected an integer, got {text!r}", line)


def parse_group(text: str, line: Optional[int] = None) -> Group:
    """``Z``, ``cyclic N`` and ``table N cells...`` factors joined by ``*``."""
    factors: List[FactorSpec] = []
    try:
        for part in text.split("*"):
            tokens = part.split()
            if tokens == ["Z"]:
                factors.append(FactorSpec.infinite_cyclic())
            elif len(tokens) == 2 and tokens[0] == "cyclic":
                factors.append(FactorSpec.cyclic(_int(tokens[1], line or 0)))
            elif len(tokens) >= 2 and tokens[0] == "table":
                n = _int(tokens[1], line or 0)
                cells = [_int(t, line or 0) for t in tokens[2:]]
                if len(cells) != n * n:
                    raise SpecSyntaxError(f"table {n} needs {n * n} entries, got {len(cells)}", line)
                factors.append(FactorSpec.from_table(n, [cells[i * n:(i + 1) * n] for i in range(n)]))
            else:
                raise SpecSyntaxError(f"unknown group factor {part.strip()!r}", line)
        return Group(tuple(factors))
    except SpecSyntaxError:
        raise
    except StructuralError as e:
        raise SpecSyntaxError(str(e), line)


class SpecFile:
    """Named objects of a parsed file, built on first use."""

    def __init__(self, sections: List[Section]):
        self.sections = sections
        self._by_name = {s.name: s for s in sections}
        self._cache: Dict[str, object] = {}
        self._resolving: Set[str] = set()

    def names(self, kind: str) -> List[str]:
        return [s.name for s in self.sections if s.kind == kind]

    def section(self, name: str) -> Section:
        return self._by_name[name]

    def get(self, kind: str, name: str, line: Optional[int] = None) -> object:
        section = self._by_name.get(name)
        if section is None or section.kind != kind:
            raise SpecSyntaxError(f"undefined {kind} {name!r}", line)
        if name in self._cache:
            return self._cache[name]
        if name in self._resolving:
            raise SpecSyntaxError(f"circular reference through {name!r}", section.line)
        self._resolving.add(name)
        try:
            built = _BUILDERS[kind](self, section)
        except SpecSyntaxError:
            raise
        except StructuralError as e:
            raise SpecSyntaxError(f"{kind} {name!r}: {e}", section.line)
        finally:
            self._resolving.discard(name)
        self._cache[name] = built
        return built

    def pick(self, kind: str, name: Optional[str] = None) -> object:
        """The named object, or the only object of that kind."""
        if name:
            return self.get(kind, name)
        names = self.names(kind)
        if len(names) != 1:
            raise StructuralError(
                f"the file defines {len(names)} {kind} sections; name the one to use"
            )
        return self.get(kind, names[0])

    def group(self, ref: str, line: int) -> Group:
        section = self._by_name.get(ref)
        if section is not None and section.kind == "group":
            return self.get("group", ref, line)  # type: ignore[return-value]
        return parse_group(ref, line)

    def sft(self, name: str, line: Optional[int] = None) -> Sft:
        return self.get("sft", name, line)  # type: ignore[return-value]

    def alphabet_map(self, name: str, line: Optional[int] = None) -> AlphabetMap:
        return self.get("map", name, line)  # type: ignore[return-value]

    def automaton(self, name: str, line: Optional[int] = None) -> LetteredAutomaton:
        return self.get("automaton", name, line)  # type: ignore[return-value]


# ----------------------------------------------------------------------
# Section builders
# ----------------------------------------------------------------------


def _build_group(spec: SpecFile, section: Section) -> Group:
    if not section.body:
        raise SpecSyntaxError(f"group {section.name!r} has no factors", section.line)
    factors: List[FactorSpec] = []
    for ln, text in section.body:
        factors.extend(parse_group(text, ln).factors)
    return Group(tuple(factors))


def _parse_window(group: Group, f: Fields, section: Section) -> List[GroupElement]:
    ln = f.line("window", section.line)
    try:
        listed = [group.parse_element(t) for t in (f.value("window") or "").split()]
    except StructuralError as e:
        raise SpecSyntaxError(str(e), ln)
    if not listed:
        raise SpecSyntaxError("window must not be empty", ln)
    if len(set(listed)) != len(listed):
        raise SpecSyntaxError("window lists an element twice", ln)
    return listed


def _parse_pattern(
    group: Group, alphabet: Sequence[str], listed: Sequence[GroupElement], ln: int, text: str
) -> Dict[GroupElement, int]:
    index = {a: k for k, a in enumerate(alphabet)}
    if "@" in text:
        cells: Dict[GroupElement, int] = {}
        for token in text.split():
            letter, _, element = token.partition("@")
            if letter not in index:
                raise SpecSyntaxError(f"letter {letter!r} is not in the alphabet", ln)
            try:
                g = group.parse_element(element)
            except StructuralError as e:
                raise SpecSyntaxError(str(e), ln)
            if g not in listed:
                raise SpecSyntaxError(f"element {element!r} is outside the window", ln)
            cells[g] = index[letter]
        return cells
    try:
        letters = parse_word(alphabet, text)
    except ValueError as e:
        raise SpecSyntaxError(str(e), ln)
    if len(letters) > len(listed):
        raise SpecSyntaxError("pattern is longer than the window", ln)
    return dict(zip(listed, letters))


def _build_sft(spec: SpecFile, section: Section) -> Sft:
    f = _fields(section, ("group", "alphabet", "window"), ("allowed", "forbidden"))
    _no_other(f)
    _require(section, f, "group", "alphabet", "window")
    group = spec.group(f.value("group") or "", f.line("group", section.line))
    alphabet = tuple((f.value("alphabet") or "").split())
    if not alphabet:
        raise SpecSyntaxError("alphabet must not be empty", f.line("alphabet", section.line))
    listed = _parse_window(group, f, section)
    window = make_support(listed)
    position = {g: k for k, g in enumerate(window)}
    patterns = [_parse_pattern(group, alphabet, listed, ln, text) for ln, text in f.tail]
    every = product(range(len(alphabet)), repeat=len(window))
    if f.tail_key is None:
        rows = set(every)
    elif f.tail_key == "allowed":
        rows = set()
        for (ln, _), cells in zip(f.tail, patterns):
            if len(cells) != len(window):
                raise SpecSyntaxError("allowed patterns must fill the whole window", ln)
            rows.add(tuple(cells[g] for g in window))
    else:
        keyed = [[(position[g], a) for g, a in cells.items()] for cells in patterns]
        rows = {r for r in every if not any(all(r[k] == a for k, a in p) for p in keyed)}
    return Sft(group, alphabet, window, frozenset(rows))


def _build_map(spec: SpecFile, section: Section) -> AlphabetMap:
    f = _fields(section, ("source", "target"))
    _require(section, f, "source", "target")
    mapping: Dict[str, str] = {}
    for ln, text in f.other:
        left, arrow, right = text.partition("->")
        if not arrow or len(left.split()) != 1 or len(right.split()) != 1:
            raise SpecSyntaxError(f"expected 'letter -> letter', got {text!r}", ln)
        if left.strip() in mapping:
            raise SpecSyntaxError(f"letter {left.strip()!r} mapped twice", ln)
        mapping[left.strip()] = right.strip()
    return AlphabetMap.from_names(
        (f.value("source") or "").split(), (f.value("target") or "").split(), mapping
    )


def _build_presentation(spec: SpecFile, section: Section) -> SoficPresentation:
    f = _fields(section, ("labels", "vertices"))
    _require(section, f, "labels", "vertices")
    labels = tuple((f.value("labels") or "").split())
    count = _int(f.value("vertices") or "", f.line("vertices", section.line))
    index = {a: k for k, a in enumerate(labels)}
    edges = []
    for ln, text in f.other:
        tokens = text.split()
        if len(tokens) != 4 or tokens[0] != "edge":
            raise SpecSyntaxError(f"expected 'edge u v label', got {text!r}", ln)
        if tokens[3] not in index:
            raise SpecSyntaxError(f"label {tokens[3]!r} is not declared", ln)
        edges.append((_int(tokens[1], ln), _int(tokens[2], ln), index[tokens[3]]))
    return SoficPresentation.build(labels, count, edges)


AUTOMATON_KEYS = ("group", "colors", "letters", "case1", "case2", "product", "left-map", "right-map")


def automaton_plan(spec: SpecFile, section: Section) -> Callable[[], LetteredAutomaton]:
    """Validate an automaton section and return the construction to run."""
    f = _fields(section, AUTOMATON_KEYS)
    derived = [k for k in ("case1", "case2", "product") if k in f.values]
    if len(derived) > 1:
        raise SpecSyntaxError("choose one of case1, case2 and product", section.line)
    if derived:
        _no_other(f)
        key = derived[0]
        ln = f.line(key, section.line)
        refs = (f.value(key) or "").split()
        if key in ("case1", "case2"):
            if len(refs) != 1:
                raise SpecSyntaxError(f"{key} takes one sft name", ln)
            x = spec.sft(refs[0], ln)
            return (lambda: case1_finite_automaton(x)) if key == "case1" else (lambda: case2_for_sft(x))
        if len(refs) != 2:
            raise SpecSyntaxError("product takes two automaton names", ln)
        _require(section, f, "left-map", "right-map")
        phi = spec.alphabet_map(f.value("left-map") or "", f.line("left-map", ln))
        psi = spec.alphabet_map(f.value("right-map") or "", f.line("right-map", ln))
        for ref in refs:
            if ref not in spec.names("automaton"):
                raise SpecSyntaxError(f"undefined automaton {ref!r}", ln)

        def build_product() -> LetteredAutomaton:
            left, right = spec.automaton(refs[0], ln), spec.automaton(refs[1], ln)
            return product_automaton(left.automaton, phi, right.automaton, psi)

        return build_product

    _require(section, f, "group", "colors")
    group = spec.group(f.value("group") or "", f.line("group", section.line))
    colors = tuple((f.value("colors") or "").split())
    index = {c: k for k, c in enumerate(colors)}
    mapping: Dict[Tuple[GroupElement, int], int] = {}
    for ln, text in f.other:
        tokens = text.split()
        if len(tokens) != 5 or tokens[0] != "Omega" or tokens[3] != "->":
            raise SpecSyntaxError(f"expected 'Omega <generator> <color> -> <color>', got {text!r}", ln)
        try:
            s = group.parse_element(tokens[1])
        except StructuralError as e:
            raise SpecSyntaxError(str(e), ln)
        if s not in group.generators:
            raise SpecSyntaxError(f"{tokens[1]!r} is not a generator", ln)
        for c in (tokens[2], tokens[4]):
            if c not in index:
                raise SpecSyntaxError(f"color {c!r} is not declared", ln)
        mapping[(s, index[tokens[2]])] = index[tokens[4]]
    try:
        automaton = ColoringAutomaton.from_mapping(group, colors, mapping)
    except StructuralError as e:
        raise SpecSyntaxError(str(e), section.line)
    if "letters" in f.values:
        letters = spec.alphabet_map(f.value("letters") or "", f.line("letters", section.line))
        if letters.source != colors:
            raise SpecSyntaxError("letter map must start at the colors", f.line("letters", section.line))
    else:
        letters = AlphabetMap.identity(colors)
    return lambda: LetteredAutomaton(automaton, letters)


def _build_automaton(spec: SpecFile, section: Section) -> LetteredAutomaton:
    return automaton_plan(spec, section)()


def _build_system(spec: SpecFile, section: Section) -> InverseSystem:
    levels: List[Tuple[Sft, Optional[AlphabetMap]]] = []
    for ln, text in section.body:
        tokens = text.split()
        if tokens[:1] != ["level"] or len(tokens) not in (2, 3):
            raise SpecSyntaxError(f"expected 'level <sft> [<map>|identity]', got {text!r}", ln)
        x = spec.sft(tokens[1], ln)
        bond: Optional[AlphabetMap] = None
        if len(tokens) == 3:
            if not levels:
                raise SpecSyntaxError("the first level has no bonding map", ln)
            bond = AlphabetMap.identity(x.alphabet) if tokens[2] == "identity" else spec.alphabet_map(tokens[2], ln)
        elif levels:
            raise SpecSyntaxError("levels after the first need a bonding map", ln)
        levels.append((x, bond))
    if not levels:
        raise SpecSyntaxError(f"system {section.name!r} has no levels", section.line)
    return InverseSystem(tuple(levels))


def _build_pseudo_orbit(spec: SpecFile, section: Section) -> PseudoOrbit:
    f = _fields(section, ("sft", "coarse"), ("blocks",))
    _no_other(f)
    _require(section, f, "sft", "coarse")
    x = spec.sft(f.value("sft") or "", f.line("sft", section.line))
    coarse = _int(f.value("coarse") or "", f.line("coarse", section.line))
    blocks = []
    for ln, text in f.tail:
        try:
            blocks.append(tuple(parse_word(x.alphabet, text)))
        except ValueError as e:
            raise SpecSyntaxError(str(e), ln)
    if not blocks:
        raise SpecSyntaxError(f"pseudo-orbit {section.name!r} has no blocks", section.line)
    return PseudoOrbit(x, len(blocks[0]), coarse, tuple(blocks))


_BUILDERS: Dict[str, Callable[[SpecFile, Section], object]] = {
    "group": _build_group,
    "sft": _build_sft,
    "automaton": _build_automaton,
    "map": _build_map,
    "presentation": _build_presentation,
    "system": _build_system,
    "pseudo-orbit": _build_pseudo_orbit,
}


def parse_spec(text: str) -> SpecFile:
    sections: List[Section] = []
    seen: Set[str] = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line:
            continue
        header = HEADER.match(line)
        if header:
            kind, name = header.groups()
            if kind not in SECTION_KINDS:
                raise SpecSyntaxError(f"unknown section kind {kind!r}", ln)
            if name in seen:
                raise SpecSyntaxError(f"name {name!r} is defined twice", ln)
            seen.add(name)
            sections.append(Section(kind, name, ln))
        elif not sections:
            raise SpecSyntaxError("content before the first section header", ln)
        else:
            sections[-1].body.append((ln, line))
    spec = SpecFile(sections)
    for section in sections:
        if section.kind == "automaton":
            automaton_plan(spec, section)
        else:
            spec.get(section.kind, section.name)
    logger.debug(f"parsed {len(sections)} sections")
    return spec


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------


def _serialize_sft(spec: SpecFile, section: Section) -> List[str]:
    x = spec.sft(section.name)
    ref = _fields(section, ("group", "alphabet", "window"), ("allowed", "forbidden")).value("group") or ""
    fmt = x.group.format_element
    lines = [
        f"group: {ref if ref in spec.names('group') else x.group.describe()}",
        f"alphabet: {' '.join(x.alphabet)}",
        f"window: {' '.join(fmt(w) for w in x.window)}",
        "allowed:",
    ]
    lines.extend(format_word(x.alphabet, row) for row in sorted(x.allowed))
    return lines


def _serialize_automaton(spec: SpecFile, section: Section) -> List[str]:
    f = _fields(section, AUTOMATON_KEYS)
    derived = [k for k in ("case1", "case2", "product", "left-map", "right-map") if k in f.values]
    if derived:
        return [f"{k}: {' '.join((f.value(k) or '').split())}" for k in derived]
    a = spec.automaton(section.name).automaton
    ref = f.value("group") or ""
    lines = [
        f"group: {ref if ref in spec.names('group') else a.group.describe()}",
        f"colors: {' '.join(a.colors)}",
    ]
    lines.extend(a.describe())
    if "letters" in f.values:
        lines.append(f"letters: {f.value('letters')}")
    return lines


def _serialize_section(spec: SpecFile, section: Section) -> List[str]:
    kind, name = section.kind, section.name
    if kind == "group":
        return [spec.get("group", name).describe()]  # type: ignore[attr-defined]
    if kind == "sft":
        return _serialize_sft(spec, section)
    if kind == "automaton":
        return _serialize_automaton(spec, section)
    if kind == "map":
        m = spec.alphabet_map(name)
        return [f"source: {' '.join(m.source)}", f"target: {' '.join(m.target)}"] + m.describe()
    if kind == "presentation":
        return spec.get("presentation", name).describe()  # type: ignore[attr-defined]
    if kind == "system":
        return [" ".join(text.split()) for _, text in section.body]
    f = _fields(section, ("sft", "coarse"), ("blocks",))
    p: PseudoOrbit = spec.get("pseudo-orbit", name)  # type: ignore[assignment]
    return [f"sft: {f.value('sft')}", f"coarse: {p.coarse}", "blocks:"] + [
        format_word(p.sft.alphabet, b) for b in p.blocks
    ]


def serialize_spec(spec: SpecFile) -> str:
    """Canonical text: sorted allowed sets, explicit windows and rules."""
    chunks = []
    for section in spec.sections:
        chunks.append("\n".join([f"[{section.kind} {section.name}]"] + _serialize_section(spec, section)))
    return "\n\n".join(chunks) + ("\n" if chunks else "")
