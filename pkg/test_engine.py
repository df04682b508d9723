import pytest
from pydantic import ValidationError

from config import load_settings
from diagram import Diagram, ElementId, Fact, PreDiagram, generate
from engine import ReasoningEngine
from errors import TheorySyntaxError, UndeclaredRelationError
from models import (
    ChaseRequest,
    ChaseStatus,
    CheckRequest,
    ForceRequest,
    ForcingKind,
    MorleyizeRequest,
    MorleyTarget,
    OracleRequest,
    ParseRequest,
    ProofStatus,
    ProveRequest,
    Verdict,
)

CASES = """
rel A/1, B/1, C/1.
axiom A(x) |- C(x).
axiom B(x) |- C(x).
"""

CHAIN = "rel A/1, R/2. axiom A(x) |- exists y. (R(x,y) & A(y))."


def test_parse_reports_fragment(engine, theory_source):
    """Test that parsing summarizes the theory"""
    response = engine.parse(ParseRequest(theory=theory_source("fan2")))
    assert response.name == "fan2"
    assert len(response.relations) == 8
    assert response.fragment == "positive_coherent"
    assert not response.habitative
    assert response.pretty.startswith("theory fan2")


def test_parse_errors_propagate(engine):
    with pytest.raises(TheorySyntaxError):
        engine.parse(ParseRequest(theory="rel A/1. axiom A(x) |-"))
    with pytest.raises(UndeclaredRelationError):
        engine.parse(ParseRequest(theory="axiom A |- true."))


def test_morleyize_counts_axioms(engine, theory_source):
    response = engine.morleyize(MorleyizeRequest(theory=theory_source("disj")))
    assert response.axiom_count == 9
    assert len(response.tags) == 9
    assert "A | B" in response.aliases.values()
    coherent = engine.morleyize(MorleyizeRequest(theory=theory_source("disj"), target=MorleyTarget.COHERENT))
    assert coherent.axiom_count == 11


def test_chase_from_a_given_diagram(engine, theory_source):
    a = ElementId(0, 0, "a")
    start = generate(PreDiagram((a,), (Fact("A", (a,)),)))
    response = engine.chase(ChaseRequest(theory=theory_source("witness"), diagram=start.to_model()))
    assert response.status == ChaseStatus.SATURATED
    assert len(response.trace.steps) == 2
    assert len(Diagram.from_model(response.diagram)) == 2


def test_chase_fuel_comes_from_settings(theory_source, monkeypatch):
    monkeypatch.setenv("ENGINE_CHASE_FUEL", "3")
    engine = ReasoningEngine(load_settings())
    assert engine.settings.chase_fuel == 3
    response = engine.chase(ChaseRequest(theory=CHAIN + " axiom true |- exists x. A(x)."))
    assert response.status == ChaseStatus.FUEL_EXHAUSTED
    assert len(response.trace.steps) == 3


def test_invalid_settings_are_rejected(monkeypatch):
    monkeypatch.setenv("ENGINE_MAX_SIZE", "9")
    with pytest.raises(ValidationError):
        load_settings()


def test_prove_and_check(engine, theory_source):
    source = theory_source("fan2")
    response = engine.prove(ProveRequest(theory=source, sequent="true |- B"))
    assert response.verdict == ProofStatus.PROVED
    assert response.depth == 4
    assert len(response.certificates) == 1
    check = engine.check(CheckRequest(theory=source, sequent="true |- B", certificates=response.certificates))
    assert check.ok


def test_prove_splits_disjunctive_antecedents(engine):
    response = engine.prove(ProveRequest(theory=CASES, sequent="A(x) | B(x) |- C(x)"))
    assert response.verdict == ProofStatus.PROVED
    assert len(response.certificates) == 2
    check = engine.check(CheckRequest(theory=CASES, sequent="A(x) | B(x) |- C(x)",
                                      certificates=response.certificates[:1]))
    assert not check.ok
    assert check.failure == "expected 2 certificates, got 1"


def test_prove_reports_open_branch(engine, theory_source):
    response = engine.prove(ProveRequest(theory=theory_source("fan2_missing"), sequent="true |- B"))
    assert response.verdict == ProofStatus.UNKNOWN
    assert response.saturated
    assert response.open_branch[0] == 0
    assert response.open_diagram is not None
    assert response.certificates == []


def test_depth_override(engine):
    response = engine.prove(ProveRequest(theory="rel B/1. " + CHAIN, sequent="A(x) |- B(x)", max_depth=2))
    assert response.verdict == ProofStatus.UNKNOWN
    assert response.depth == 2
    assert not response.saturated


def test_force_readings(engine, theory_source):
    source = theory_source("disj")
    assert engine.force(ForceRequest(theory=source, query="A | B")).verdict == Verdict.FORCED
    assert engine.force(ForceRequest(theory=source, query="A")).verdict == Verdict.NOT_FORCED
    kripke = engine.force(ForceRequest(theory=source, query="A | B", kind=ForcingKind.KRIPKE))
    assert kripke.verdict == Verdict.NOT_FORCED
    response = engine.force(ForceRequest(theory=source, query="A | B", depth=1))
    assert len(response.nodes) == 3
    assert response.tuples == [[]]


def test_force_dot(engine, theory_source):
    dot = engine.force_dot(ForceRequest(theory=theory_source("disj"), query="A | B", depth=1))
    assert dot.startswith("digraph forcing {")
    assert "n0 forced" in dot


def test_oracle(engine, theory_source):
    source = theory_source("disj")
    refuted = engine.oracle(OracleRequest(theory=source, sequent="true |- A", max_size=1))
    assert not refuted.valid
    assert refuted.countermodel is not None
    assert refuted.max_size == 1
    assert engine.oracle(OracleRequest(theory=source, sequent="true |- A | B")).valid


def test_status(engine):
    assert engine.status == "healthy"
