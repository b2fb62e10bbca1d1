"""Shared pytest fixtures for symdyn tests."""
import json
import os
import random
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Generator

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

SPECS_DIR = Path(__file__).parent.parent / "specs"


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        type=int,
        default=int(os.environ.get("SYMDYN_TEST_SEED", "0")),
        help="seed for randomized property tests",
    )


@pytest.fixture
def rng(request) -> random.Random:
    """Seeded generator; every randomized test draws from this."""
    return random.Random(request.config.getoption("--seed"))


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    tmp = Path(tempfile.mkdtemp())
    yield tmp
    shutil.rmtree(tmp, ignore_errors=True)


@pytest.fixture
def temp_config_file(temp_dir: Path) -> Path:
    """Create a temporary config file."""
    config_path = temp_dir / "config.json"
    config_path.write_text(json.dumps({
        "radius": 2,
        "length": 6,
        "cap": 3,
    }))
    return config_path


@pytest.fixture
def specs_dir() -> Path:
    return SPECS_DIR


@pytest.fixture
def z():
    from services.group import integers
    return integers()


@pytest.fixture
def golden(z):
    """Golden mean shift: no two adjacent 1s."""
    from services.patterns import Sft
    return Sft.from_forbidden(z, ["0", "1"], [z.from_int(0), z.from_int(1)], [(1, 1)])


@pytest.fixture
def full2(z):
    from services.patterns import Sft
    return Sft.full_shift(z, ["0", "1"], [z.from_int(0), z.from_int(1)])


@pytest.fixture
def spike(z):
    """{-1, 0, 1} SFT whose points have at most one 1."""
    from services.words import word_sft
    # letter indices: 0 = -1, 1 = 0, 2 = 1
    return word_sft(["-1", "0", "1"], 2, [(0, 0), (0, 2), (2, 1), (1, 1)])


@pytest.fixture
def p0():
    from services.codes import AlphabetMap
    return AlphabetMap.from_names(["-1", "0", "1"], ["0", "1"], {"-1": "0", "0": "0", "1": "1"})


@pytest.fixture
def even_small():
    from services.sofic import SoficPresentation
    return SoficPresentation.build(["0", "1"], 2, [(0, 0, 0), (0, 1, 1), (1, 0, 1)])


@pytest.fixture
def even_large():
    from services.sofic import SoficPresentation
    return SoficPresentation.build(
        ["0", "1"], 3, [(0, 0, 0), (0, 1, 1), (1, 2, 1), (2, 2, 0), (2, 1, 1)]
    )


@pytest.fixture
def swap(z):
    """Period-2 automaton over Z."""
    from services.automaton import ColoringAutomaton
    minus, plus = z.from_int(-1), z.from_int(1)
    return ColoringAutomaton.from_mapping(
        z, ["a", "b"], {(plus, 0): 1, (plus, 1): 0, (minus, 0): 1, (minus, 1): 0}
    )


@pytest.fixture
def write_spec(temp_dir: Path):
    """Write spec text to a file and return its path."""
    def _write(text: str, name: str = "test.sds") -> Path:
        path = temp_dir / name
        path.write_text(text)
        return path
    return _write
