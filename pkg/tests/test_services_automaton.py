"""
Tests for services/automaton module.
"""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import (
    BudgetError,
    NotApplicableError,
    PreconditionError,
    StructuralError,
    UnsupportedInputError,
)
from lib.models import Outcome
from services.automaton import (
    ColoringAutomaton,
    arrival,
    arrow_word,
    case1_finite_automaton,
    case2_for_sft,
    case2_nmc_automaton,
    dichotomy_check,
    generated_patterns,
    isolation_certificate,
    product_automaton,
    projection_check,
    run,
    split_tracked_name,
    tilde_sft,
    tracked_name,
    verify_run,
)
from services.codes import AlphabetMap
from services.extension import extendable_rows
from services.group import IDENTITY, FactorSpec, Group, GroupElement
from services.patterns import Pattern, Sft, locally_admissible
from services.specfile import parse_spec
from services.words import language, rauzy_digraph, word_sft


def el(*syllables):
    return GroupElement(tuple(syllables))


@pytest.fixture
def z3():
    return Group((FactorSpec.cyclic(3),))


@pytest.fixture
def one_mark(z3):
    window = z3.ball(1)
    return Sft(z3, ("0", "1"), window, frozenset({(1, 0, 0), (0, 1, 0), (0, 0, 1)}))


@pytest.fixture
def flip():
    g = Group((FactorSpec.cyclic(2),))
    s = g.generators[0]
    return ColoringAutomaton.from_mapping(g, ["a", "b"], {(s, 0): 1, (s, 1): 0})


@pytest.fixture
def turn(z3):
    up, down = z3.generators
    mapping = {}
    for c in range(3):
        mapping[(up, c)] = (c + 1) % 3
        mapping[(down, c)] = (c - 1) % 3
    return ColoringAutomaton.from_mapping(z3, ["p", "q", "r"], mapping)


class TestColoringAutomaton:
    """Tests for automaton construction."""

    def test_not_total(self, z):
        with pytest.raises(StructuralError, match="not total"):
            ColoringAutomaton.from_mapping(z, ["a"], {(z.from_int(1), 0): 0})

    def test_color_out_of_range(self, z):
        with pytest.raises(StructuralError, match="outside"):
            ColoringAutomaton(z, ("a",), ((0,), (1,)))

    def test_repeated_colors(self, z):
        with pytest.raises(StructuralError, match="distinct"):
            ColoringAutomaton(z, ("a", "a"), ((0, 0), (0, 0)))

    def test_describe(self, swap):
        assert swap.describe()[0] == "Omega -1 a -> b"
        assert len(swap.describe()) == 4


class TestRuns:
    """Tests for runs and their verification."""

    def test_arrival_on_integers(self, z):
        assert arrival(z, z.from_int(3)) == (z.from_int(2), z.from_int(1))
        assert arrival(z, z.from_int(-2)) == (z.from_int(-1), z.from_int(-1))

    def test_arrival_in_finite_factor(self):
        g = Group((FactorSpec.cyclic(2), FactorSpec.cyclic(3)))
        assert arrival(g, el((0, 1), (1, 2))) == (el((0, 1)), el((1, 2)))

    def test_arrow_words(self, z):
        assert arrow_word(z, z.from_int(1)) == "<>"
        assert arrow_word(z, z.from_int(-1)) == "><"

    def test_arrow_word_in_finite_factor(self):
        g = Group((FactorSpec.cyclic(2), FactorSpec.cyclic(3)))
        assert arrow_word(g, el((1, 1))) == ">-<"

    def test_swap_run_alternates(self, swap, z):
        cfg = run(swap, IDENTITY, 0, 3)
        assert [cfg.colors[z.from_int(k)] for k in range(-3, 4)] == [1, 0, 1, 0, 1, 0, 1]
        assert cfg.arrows[IDENTITY] == ">>"
        assert cfg.arrows[z.from_int(2)] == "<>"
        assert verify_run(cfg) == []

    def test_run_from_shifted_start(self, swap, z):
        cfg = run(swap, z.from_int(5), 1, 1)
        assert cfg.domain == [z.from_int(4), z.from_int(5), z.from_int(6)]
        assert cfg.arrows[z.from_int(5)] == ">>"
        assert verify_run(cfg) == []

    def test_tampered_color(self, swap, z):
        cfg = run(swap, IDENTITY, 0, 2)
        cfg.colors[z.from_int(2)] = 1
        problems = verify_run(cfg)
        assert problems
        assert problems[0][0] == z.from_int(2)

    def test_tampered_arrows(self, swap, z):
        cfg = run(swap, IDENTITY, 0, 2)
        cfg.arrows[z.from_int(1)] = "<<"
        reasons = [reason for _, reason in verify_run(cfg)]
        assert "more than one back arrow" in reasons

    def test_bad_color(self, swap):
        with pytest.raises(StructuralError):
            run(swap, IDENTITY, 2, 1)

    def test_finite_factor_run(self, turn, z3):
        cfg = run(turn, IDENTITY, 0, 1)
        assert sorted(cfg.colors.values()) == [0, 1, 2]
        assert verify_run(cfg) == []


class TestTrackedSft:
    """Tests for the tracked SFT and its checks."""

    def test_names(self):
        assert tracked_name(("a", "b"), (1, "<>")) == "b|<>"
        assert split_tracked_name("b|<>") == ("b", "<>")
        with pytest.raises(StructuralError):
            split_tracked_name("b")

    def test_swap_letters(self, swap):
        t = tilde_sft(swap, 4)
        assert len(t.letters) == 6
        assert len(t.sft.allowed) == 10
        assert t.stabilized_at == 3
        assert set(t.letter_map.images) == {0, 1}

    def test_sample_radius(self, swap):
        with pytest.raises(StructuralError):
            tilde_sft(swap, 0)

    def test_dichotomy_holds(self, swap):
        verdict = dichotomy_check(tilde_sft(swap, 4).sft, 2)
        assert verdict.status == "dichotomy-holds"

    def test_dichotomy_fails_on_two_starts(self, swap, z):
        t = tilde_sft(swap, 4)
        x = t.sft
        start = [k for k, name in enumerate(x.alphabet) if name.endswith(">>")]
        # two adjacent starts
        rows = set(x.allowed) | {(start[0], start[1], start[1]), (start[1], start[0], start[0])}
        broken = Sft(x.group, x.alphabet, x.window, frozenset(rows))
        verdict = dichotomy_check(broken, 1, margin=0)
        assert verdict.outcome == Outcome.NEGATIVE

    def test_isolation_certificate(self, swap):
        verdict = isolation_certificate(tilde_sft(swap, 4))
        assert verdict.status == "isolation-certified"
        assert verdict.certificate["start patterns"] == "2"

    def test_generated_patterns(self, swap):
        found = generated_patterns(swap, 1, 4)
        assert found.rows == frozenset({(0, 1, 1), (1, 0, 0)})
        assert found.stabilized

    def test_projection(self, swap):
        verdict = projection_check(tilde_sft(swap, 4), 1)
        assert verdict.status == "projection-onto"


class TestCase1:
    def test_colors_are_configurations(self, one_mark):
        lettered = case1_finite_automaton(one_mark)
        assert lettered.automaton.colors == ("001", "010", "100")
        assert lettered.letters.images == (0, 0, 1)

    def test_generates_the_sft(self, one_mark):
        lettered = case1_finite_automaton(one_mark)
        found = generated_patterns(lettered.automaton, 1, 2)
        assert {lettered.letters.apply(row) for row in found.rows} == set(one_mark.allowed)

    def test_needs_finite_group(self, golden):
        with pytest.raises(UnsupportedInputError):
            case1_finite_automaton(golden)

    def test_order_cap(self):
        g = Group((FactorSpec.cyclic(7),))
        x = Sft.full_shift(g, ["0"])
        with pytest.raises(BudgetError):
            case1_finite_automaton(x)


class TestCase2:
    """Tests for the NMC construction over Z."""

    def test_spike(self, spike, z):
        lettered = case2_for_sft(spike)
        assert lettered.level == 1
        assert lettered.automaton.colors == ("-1", "0", "1")
        found = generated_patterns(lettered.automaton, 2, 6)
        generated = {lettered.letters.apply(row) for row in found.rows}
        assert generated == extendable_rows(spike, z.ball(2), 2)

    @pytest.mark.parametrize("kind", ["spike", "single-cycle"])
    def test_letter_language_matches(self, kind, spike, z):
        x = spike if kind == "spike" else word_sft(["a", "b"], 2, [(0, 1), (1, 0)])
        lettered = case2_for_sft(x)
        found = generated_patterns(lettered.automaton, 4, 10)
        position = {g: k for k, g in enumerate(found.support)}
        line = [position[z.from_int(i)] for i in range(-4, 5)]
        blocks = {tuple(lettered.letters.images[row[k]] for k in line) for row in found.rows}
        for n in range(1, 9):
            words = {b[i:i + n] for b in blocks for i in range(len(b) - n + 1)}
            assert words == set(language(x, n))

    def test_single_cycle(self):
        graph = rauzy_digraph(["a", "b"], [(0, 1), (1, 0)])
        lettered = case2_nmc_automaton(graph, ["a", "b"])
        assert lettered.automaton.rule == ((1, 0), (1, 0))

    def test_middle_cycle_persists(self):
        graph = rauzy_digraph(["a", "b", "c"], [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)])
        with pytest.raises(NotApplicableError):
            case2_nmc_automaton(graph, ["a", "b", "c"], cap=3)

    def test_empty_graph(self):
        with pytest.raises(PreconditionError):
            case2_nmc_automaton(rauzy_digraph([], []), ["a"])


class TestProductAutomaton:
    def test_rule(self, flip, turn):
        phi0 = AlphabetMap.from_names(["a", "b"], ["0", "1"], {"a": "0", "b": "1"})
        psi0 = AlphabetMap.from_names(["p", "q", "r"], ["0", "1"], {"p": "0", "q": "1", "r": "1"})
        lettered = product_automaton(flip, phi0, turn, psi0)
        a = lettered.automaton
        assert a.colors == ("a/p", "b/q", "b/r")
        assert a.group.describe() == "cyclic 2 * cyclic 3"
        assert a.rule[0] == (1, 0, 0)
        assert a.rule[1] == (1, 2, 0)
        assert lettered.letters.images == (0, 1, 1)

    def test_needs_surjective_maps(self, flip, turn):
        phi0 = AlphabetMap.from_names(["a", "b"], ["0", "1"], {"a": "0", "b": "1"})
        psi0 = AlphabetMap.from_names(["p", "q", "r"], ["0", "1"], {"p": "0", "q": "0", "r": "0"})
        with pytest.raises(PreconditionError):
            product_automaton(flip, phi0, turn, psi0)

    def test_maps_must_match_colors(self, flip, turn):
        wrong = AlphabetMap.identity(["x", "y"])
        with pytest.raises(StructuralError):
            product_automaton(flip, wrong, turn, wrong)


def _product_letters():
    phi0 = AlphabetMap.from_names(["a", "b"], ["0", "1"], {"a": "0", "b": "1"})
    psi0 = AlphabetMap.from_names(["p", "q", "r"], ["0", "1"], {"p": "0", "q": "1", "r": "1"})
    return phi0, psi0


SUITE = ["swap", "spike-nmc", "one-mark", "flip-turn", "f2-swap"]


@pytest.fixture(params=SUITE)
def suite_automaton(request, swap, spike, one_mark, flip, turn):
    name = request.param
    if name == "swap":
        return swap
    if name == "spike-nmc":
        return case2_for_sft(spike).automaton
    if name == "one-mark":
        return case1_finite_automaton(one_mark).automaton
    if name == "flip-turn":
        phi0, psi0 = _product_letters()
        return product_automaton(flip, phi0, turn, psi0).automaton
    same = AlphabetMap.identity(swap.colors)
    return product_automaton(swap, same, swap, same).automaton


class TestAutomatonSuite:
    """Runs and tracked-SFT checks across automata over Z, Z3, Z2 * Z3 and F2."""

    def test_runs_follow_local_rules(self, suite_automaton):
        for color in range(len(suite_automaton.colors)):
            assert verify_run(run(suite_automaton, IDENTITY, color, 5)) == []

    def test_dichotomy(self, suite_automaton):
        verdict = dichotomy_check(tilde_sft(suite_automaton, 4).sft, 3)
        assert verdict.status == "dichotomy-holds"

    def test_projection(self, suite_automaton):
        verdict = projection_check(tilde_sft(suite_automaton, 4), 3)
        assert verdict.status == "projection-onto"

    def test_isolation_certificate(self, suite_automaton):
        verdict = isolation_certificate(tilde_sft(suite_automaton, 4))
        assert verdict.outcome == Outcome.POSITIVE

    def test_longer_runs_stay_admissible(self, suite_automaton):
        """Runs two steps past the sampling radius only use allowed window patterns."""
        t = tilde_sft(suite_automaton, 4)
        assert t.stabilized_at is not None
        index = {letter: k for k, letter in enumerate(t.letters)}
        for color in range(len(suite_automaton.colors)):
            cfg = run(suite_automaton, IDENTITY, color, t.sample_radius + 2)
            letters = {g: cfg.letter(g) for g in cfg.domain}
            assert set(letters.values()) <= set(index)
            pattern = Pattern.from_mapping({g: index[letter] for g, letter in letters.items()})
            assert locally_admissible(t.sft, pattern)

    def test_f2_product_from_file(self, specs_dir):
        lettered = parse_spec((specs_dir / "f2swap.sds").read_text()).automaton("f2swap")
        a = lettered.automaton
        assert a.group.describe() == "Z * Z"
        assert a.colors == ("a/a", "b/b")
        assert isolation_certificate(tilde_sft(a, 4)).positive
