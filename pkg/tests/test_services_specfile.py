"""
Tests for services/specfile module.
"""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import SpecSyntaxError, StructuralError, UnsupportedInputError
from services.group import IDENTITY, GroupElement
from services.specfile import parse_group, parse_spec, serialize_spec

SPECS_DIR = Path(__file__).parent.parent / "specs"

GOLDEN = """
[sft golden]
group: Z
alphabet: 0 1
window: 0 1
forbidden:
11
"""


class TestParseGroup:
    def test_free_product(self):
        g = parse_group("Z * cyclic 3")
        assert g.describe() == "Z * cyclic 3"

    def test_table(self):
        g = parse_group("table 2 0 1 1 0")
        assert g.factors[0].order == 2

    def test_table_size(self):
        with pytest.raises(SpecSyntaxError, match="needs 4 entries"):
            parse_group("table 2 0 1 1", 3)

    def test_unknown_factor(self):
        with pytest.raises(SpecSyntaxError, match="unknown group factor"):
            parse_group("Q")

    def test_invalid_table_becomes_syntax_error(self):
        with pytest.raises(SpecSyntaxError) as e:
            parse_group("table 2 1 0 0 1", 7)
        assert e.value.line == 7


class TestSft:
    """Tests for sft sections."""

    def test_forbidden_word(self, golden):
        assert parse_spec(GOLDEN).sft("golden") == golden

    def test_cell_pairs(self, golden):
        text = GOLDEN.replace("\n11\n", "\n1@0 1@1\n")
        assert parse_spec(text).sft("golden") == golden

    def test_allowed_rows(self, specs_dir, spike):
        spec = parse_spec((specs_dir / "spike.sds").read_text())
        assert spec.sft("spike") == spike

    def test_no_tail_is_full(self, full2, specs_dir):
        spec = parse_spec((specs_dir / "fullshift.sds").read_text())
        assert spec.sft("full2") == full2

    def test_short_forbidden_pattern(self, specs_dir):
        """A short forbidden word only pins the first cells of the window."""
        x1 = parse_spec((specs_dir / "shrinking.sds").read_text()).sft("X1")
        assert (1, 1, 0) not in x1.allowed
        assert (1, 0, 1) not in x1.allowed
        assert (0, 1, 1) in x1.allowed
        assert len(x1.allowed) == 5

    def test_allowed_must_fill_window(self):
        text = GOLDEN.replace("forbidden:\n11", "allowed:\n1")
        with pytest.raises(SpecSyntaxError, match="fill the whole window"):
            parse_spec(text)

    def test_finite_group_window(self, specs_dir):
        x = parse_spec((specs_dir / "case1.sds").read_text()).sft("one-mark")
        assert x.window == (IDENTITY, GroupElement(((0, 1),)), GroupElement(((0, 2),)))
        assert len(x.allowed) == 3

    def test_group_section_reference(self):
        text = "[group G]\nZ\ncyclic 2\n" + GOLDEN.replace("group: Z", "group: G").replace(
            "window: 0 1", "window: e 0:1"
        )
        x = parse_spec(text).sft("golden")
        assert x.group.describe() == "Z * cyclic 2"

    def test_unknown_letter(self):
        with pytest.raises(SpecSyntaxError) as e:
            parse_spec(GOLDEN.replace("\n11\n", "\n12\n"))
        assert e.value.line == 7

    def test_element_outside_window(self):
        with pytest.raises(SpecSyntaxError, match="outside the window"):
            parse_spec(GOLDEN.replace("\n11\n", "\n1@0 1@5\n"))

    def test_missing_window(self):
        with pytest.raises(SpecSyntaxError, match="no 'window' line"):
            parse_spec(GOLDEN.replace("window: 0 1\n", ""))

    def test_repeated_window_element(self):
        with pytest.raises(SpecSyntaxError, match="twice"):
            parse_spec(GOLDEN.replace("window: 0 1", "window: 0 0"))


class TestStructure:
    """Tests for file-level errors."""

    def test_unknown_kind(self):
        with pytest.raises(SpecSyntaxError, match="unknown section kind"):
            parse_spec("[widget w]\n")

    def test_duplicate_name(self):
        text = GOLDEN + "\n[map golden]\nsource: 0\ntarget: 0\n0 -> 0\n"
        with pytest.raises(SpecSyntaxError) as e:
            parse_spec(text)
        assert "defined twice" in str(e.value)
        assert e.value.line == 9

    def test_content_before_header(self):
        with pytest.raises(SpecSyntaxError, match="before the first section"):
            parse_spec("alphabet: 0 1\n")

    def test_undefined_reference(self):
        with pytest.raises(SpecSyntaxError, match="undefined sft 'nowhere'"):
            parse_spec("[pseudo-orbit p]\nsft: nowhere\ncoarse: 1\nblocks:\n00\n")

    def test_forward_reference(self):
        text = "[pseudo-orbit p]\nsft: golden\ncoarse: 1\nblocks:\n00\n01\n" + GOLDEN
        spec = parse_spec(text)
        assert spec.get("pseudo-orbit", "p").length == 1

    def test_structural_error_carries_section_line(self):
        text = "\n[map m]\nsource: a b\ntarget: 0\na -> 0\n"
        with pytest.raises(SpecSyntaxError) as e:
            parse_spec(text)
        assert "not total" in str(e.value)
        assert e.value.line == 2

    def test_pick(self, specs_dir):
        spec = parse_spec((specs_dir / "evenshift.sds").read_text())
        with pytest.raises(StructuralError, match="3 presentation sections"):
            spec.pick("presentation")
        assert spec.pick("presentation", "golden").vertex_count == 2


class TestOtherSections:
    def test_map(self, specs_dir, p0):
        spec = parse_spec((specs_dir / "spike.sds").read_text())
        assert spec.alphabet_map("p0") == p0

    def test_map_bad_line(self):
        with pytest.raises(SpecSyntaxError, match="letter -> letter"):
            parse_spec("[map m]\nsource: a\ntarget: 0\na 0\n")

    def test_presentation(self, specs_dir, even_small, even_large):
        spec = parse_spec((specs_dir / "evenshift.sds").read_text())
        assert spec.get("presentation", "even-small") == even_small
        assert spec.get("presentation", "even-large") == even_large

    def test_presentation_label(self):
        with pytest.raises(SpecSyntaxError, match="not declared"):
            parse_spec("[presentation p]\nlabels: 0\nvertices: 1\nedge 0 0 1\n")

    def test_automaton(self, specs_dir, swap):
        spec = parse_spec((specs_dir / "swap.sds").read_text())
        lettered = spec.automaton("swap")
        assert lettered.automaton == swap
        assert lettered.letters.images == (0, 1)

    def test_automaton_not_total(self):
        text = "[automaton a]\ngroup: Z\ncolors: x\nOmega 1 x -> x\n"
        with pytest.raises(SpecSyntaxError, match="not total"):
            parse_spec(text)

    def test_automaton_generator(self):
        text = "[automaton a]\ngroup: Z\ncolors: x\nOmega 2 x -> x\n"
        with pytest.raises(SpecSyntaxError, match="not a generator"):
            parse_spec(text)

    def test_case2_is_built_on_request(self, specs_dir):
        spec = parse_spec((specs_dir / "case2.sds").read_text())
        assert spec.automaton("nmc").level == 1

    def test_case1_failure_is_deferred(self):
        spec = parse_spec(GOLDEN + "\n[automaton bad]\ncase1: golden\n")
        with pytest.raises(UnsupportedInputError):
            spec.automaton("bad")

    def test_product(self, specs_dir):
        spec = parse_spec((specs_dir / "product.sds").read_text())
        assert spec.automaton("joined").automaton.colors == ("a/p", "b/q", "b/r")

    def test_product_of_itself(self):
        text = (
            "[map m]\nsource: x\ntarget: x\nx -> x\n"
            "[automaton loop]\nproduct: loop loop\nleft-map: m\nright-map: m\n"
        )
        spec = parse_spec(text)
        with pytest.raises(SpecSyntaxError, match="circular"):
            spec.automaton("loop")

    def test_two_constructions(self):
        text = GOLDEN + "\n[automaton a]\ncase1: golden\ncase2: golden\n"
        with pytest.raises(SpecSyntaxError, match="choose one"):
            parse_spec(text)

    def test_system(self, specs_dir):
        spec = parse_spec((specs_dir / "stabilizing.sds").read_text())
        system = spec.get("system", "stabilizing")
        assert len(system) == 3
        assert system.down_to(3, 1).images == (0, 1, 1)

    def test_system_first_level_bond(self):
        text = GOLDEN + "\n[system s]\nlevel golden identity\n"
        with pytest.raises(SpecSyntaxError, match="first level"):
            parse_spec(text)

    def test_system_missing_bond(self):
        text = GOLDEN + "\n[system s]\nlevel golden\nlevel golden\n"
        with pytest.raises(SpecSyntaxError, match="need a bonding map"):
            parse_spec(text)

    def test_pseudo_orbit(self, specs_dir):
        spec = parse_spec((specs_dir / "pseudo.sds").read_text())
        walk = spec.get("pseudo-orbit", "walk")
        assert walk.fine == 2
        assert walk.blocks[1] == (0, 1)


class TestSerialize:
    """Tests for the canonical text form."""

    @pytest.mark.parametrize("path", sorted(SPECS_DIR.glob("*.sds")), ids=lambda p: p.name)
    def test_bundled_specs_parse(self, path):
        spec = parse_spec(path.read_text())
        assert spec.sections

    def test_serialize_is_stable(self, specs_dir):
        text = serialize_spec(parse_spec((specs_dir / "spike.sds").read_text()))
        assert serialize_spec(parse_spec(text)) == text

    def test_forbidden_becomes_allowed(self):
        text = serialize_spec(parse_spec(GOLDEN))
        assert text == "[sft golden]\ngroup: Z\nalphabet: 0 1\nwindow: 0 1\nallowed:\n00\n01\n10\n"

    def test_derived_automaton_keeps_its_recipe(self, specs_dir):
        text = serialize_spec(parse_spec((specs_dir / "product.sds").read_text()))
        assert "product: flip turn\nleft-map: phi\nright-map: psi" in text

    def test_empty(self):
        assert serialize_spec(parse_spec("# nothing\n")) == ""
