from pathlib import Path

import pytest

from config import load_settings
from engine import ReasoningEngine
from syntax import Theory, parse_theory

THEORIES = Path(__file__).parent / "theories"


def load_theory(name: str) -> Theory:
    return parse_theory((THEORIES / f"{name}.thy").read_text(encoding="utf-8"))


@pytest.fixture
def theory_path():
    """Path of a sample theory by stem"""
    return lambda name: THEORIES / f"{name}.thy"


@pytest.fixture
def theory_source():
    return lambda name: (THEORIES / f"{name}.thy").read_text(encoding="utf-8")


@pytest.fixture
def fan():
    return load_theory("fan2")


@pytest.fixture
def fan_missing():
    return load_theory("fan2_missing")


@pytest.fixture
def bbar():
    """Two incompatible unary predicates, one of which demands an R-successor"""
    return load_theory("bbar")


@pytest.fixture
def disj():
    return load_theory("disj")


@pytest.fixture
def witness_theory():
    return load_theory("witness")


@pytest.fixture
def engine():
    """Engine with default bounds"""
    return ReasoningEngine(load_settings())
