"""
Tests for services/toeplitz module.
"""

import sys
from itertools import product
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import CorruptionError, StructuralError
from lib.models import Outcome
from services.toeplitz import (
    OMEGA,
    SPACER,
    UNCOVERED,
    classify,
    format_window,
    generate,
    level_counts,
    parse_window,
    periodicity_check,
    recover,
)


class TestGenerate:
    """Tests for Toeplitz generation."""

    def test_first_nine_positions(self):
        w = generate((1, 1, 1), 0, 8)
        assert w.values == (1, 3, 1, 1, 3, 3, 1, 3, 1)
        assert w.levels == (1, 1, 2, 1, 1, 2, 1, 1, 3)

    def test_omega_values_land_on_their_level(self):
        w = generate((2, 1, 2), 0, 26)
        assert w.value(0) == 2
        assert w.value(2) == 1
        assert w.value(8) == 2
        assert w.value(26) == 3

    def test_classify(self):
        assert classify(0, 1) == (OMEGA, 1)
        assert classify(1, 1) == (SPACER, 1)
        assert classify(2, 1) == (UNCOVERED, None)
        assert classify(5, 2) == (SPACER, 2)

    def test_negative_positions(self):
        w = generate((1, 2), -3, -1)
        assert w.values == (1, 3, 3)
        assert w.kinds == (OMEGA, SPACER, UNCOVERED)

    @pytest.mark.parametrize("omega", [(), (1, 3)])
    def test_bad_omega(self, omega):
        with pytest.raises(StructuralError):
            generate(omega, 0, 3)

    def test_empty_interval(self):
        with pytest.raises(StructuralError, match="empty interval"):
            generate((1,), 4, 3)


class TestRecover:
    """Tests for recovering omega from a window."""

    @pytest.mark.parametrize("omega", list(product((1, 2), repeat=4)))
    def test_recovers_every_omega(self, omega):
        found = recover(generate(omega, 0, 80))
        assert found.omega == omega
        assert not found.partial

    def test_level_limit(self):
        found = recover(generate((2, 1, 2, 1), 0, 80), levels=2)
        assert found.omega == (2, 1)
        assert not found.partial

    def test_window_too_small(self):
        found = recover(generate((1, 2, 1, 2), 0, 8))
        assert found.omega == (1, 2, 1)
        assert found.partial

    def test_disagreeing_level(self):
        w = generate((1, 1, 1), 0, 8).with_value(3, 2)
        with pytest.raises(CorruptionError, match="level 1"):
            recover(w)


class TestPeriodicity:
    def test_generated_window_is_periodic(self):
        verdict = periodicity_check(generate((1, 2, 2), 0, 80))
        assert verdict.status == "periodic"
        assert verdict.outcome == Outcome.POSITIVE

    def test_broken_window(self):
        w = generate((1, 2, 2), 0, 80).with_value(0, 2)
        verdict = periodicity_check(w)
        assert verdict.outcome == Outcome.NEGATIVE
        assert verdict.certificate["first failure"] == "0"

    def test_level_counts(self):
        counts = level_counts(generate((1, 1, 1), 0, 8))
        assert list(counts.items()) == [
            ((1, OMEGA), 3),
            ((1, SPACER), 3),
            ((2, OMEGA), 1),
            ((2, SPACER), 1),
            ((3, OMEGA), 1),
        ]

    def test_uncovered_counts_last(self):
        counts = level_counts(generate((1,), 0, 5))
        assert list(counts)[-1] == (None, UNCOVERED)


class TestWindowText:
    def test_format(self):
        lines = format_window(generate((1,), 0, 2))
        assert lines == ["interval 0 2", "1 omega 1", "3 spacer 1", "3 uncovered"]

    def test_parse_inverts_format(self):
        w = generate((2, 1), -4, 12)
        assert parse_window("\n".join(format_window(w))) == w

    def test_parse_skips_comments(self):
        text = "# saved window\ninterval 0 0\n2 omega 1  # first cell\n"
        assert parse_window(text).values == (2,)

    def test_parse_needs_interval(self):
        with pytest.raises(StructuralError, match="interval"):
            parse_window("1 omega 1\n")

    def test_parse_bad_kind(self):
        with pytest.raises(StructuralError, match="bad window line"):
            parse_window("interval 0 0\n1 middle 1\n")

    def test_parse_length_mismatch(self):
        with pytest.raises(StructuralError, match="does not cover"):
            parse_window("interval 0 1\n1 omega 1\n")
