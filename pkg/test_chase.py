import pytest

from chase import (
    ChaseTrace,
    applications,
    chase_regular,
    check_derivation,
    conservativity_witness,
    is_model,
    regular_axioms,
    replay,
    weak_reflection_lift,
)
from diagram import Diagram, ElementId, Fact, Homomorphism, PreDiagram, generate, is_subdiagram
from errors import BoundExceededError, ChaseError, FragmentError, LiftError, WitnessError
from models import ChaseStatus
from syntax import Atom, parse_theory


def named(serial, name):
    return ElementId(serial, 0, name)


@pytest.fixture
def chain():
    return parse_theory("rel A/1, R/2. axiom A(x) |- exists y. (R(x,y) & A(y)).")


@pytest.fixture
def start():
    """A single element satisfying A"""
    a = named(0, "a")
    return generate(PreDiagram((a,), (Fact("A", (a,)),)))


def test_habitative_chase_adds_one_element():
    result = chase_regular(parse_theory("rel A/1. habitative."), Diagram.empty())
    assert result.status == ChaseStatus.SATURATED
    assert len(result.diagram) == 1
    assert len(result.trace) == 1


def test_chase_of_witness_theory(witness_theory, start):
    result = chase_regular(witness_theory, start)
    a = start.domain[0]
    assert result.status == ChaseStatus.SATURATED
    assert len(result.trace) == 2
    assert len(result.diagram) == 2
    fresh = result.trace.steps[0].fresh[0]
    assert fresh.gen == 1
    assert result.diagram.holds("R", (a, fresh))
    assert result.diagram.holds("B", (a,))
    assert is_subdiagram(start, result.diagram)
    assert is_model(witness_theory, result.diagram)


def test_fuel_exhaustion_on_infinite_chain(chain, start):
    result = chase_regular(chain, start, fuel=5)
    assert result.status == ChaseStatus.FUEL_EXHAUSTED
    assert len(result.trace) == 5
    assert len(result.diagram) == 6
    assert not is_model(chain, result.diagram)


def test_fuel_must_be_positive(chain, start):
    with pytest.raises(ChaseError):
        chase_regular(chain, start, fuel=0)


def test_equality_heads_merge_elements():
    t = parse_theory("rel R/2. axiom R(x,y) & R(x,z) |- y = z.")
    a, b, c = named(0, "a"), named(1, "b"), named(2, "c")
    d = generate(PreDiagram((a, b, c), (Fact("R", (a, b)), Fact("R", (a, c)))))
    result = chase_regular(t, d)
    assert result.status == ChaseStatus.SATURATED
    assert len(result.trace) == 1
    assert result.diagram.rep(c) == b
    assert len(result.diagram.representatives()) == 2


def test_non_regular_theories_are_rejected(bbar, disj):
    with pytest.raises(FragmentError):
        regular_axioms(bbar)
    with pytest.raises(FragmentError):
        chase_regular(disj, Diagram.empty())


def test_chase_is_deterministic(chain, start):
    first, second = chase_regular(chain, start, fuel=7), chase_regular(chain, start, fuel=7)
    assert first.diagram == second.diagram
    assert first.trace == second.trace


def test_replay_reproduces_the_output(witness_theory, start):
    result = chase_regular(witness_theory, start)
    assert replay(result.trace, start, witness_theory) == result.diagram


def test_replay_detects_divergence(witness_theory, start):
    result = chase_regular(witness_theory, start)
    bare = generate(PreDiagram(start.domain))
    with pytest.raises(ChaseError):
        replay(result.trace, bare, witness_theory)


def test_trace_model_round_trip(chain, start):
    result = chase_regular(chain, start, fuel=3)
    model = result.trace.to_model(result.axioms)
    assert [step.axiom for step in model.steps] == [0, 0, 0]
    assert ChaseTrace.from_model(model, start) == result.trace


def test_applications_are_ordered(chain, start):
    result = chase_regular(chain, start, fuel=3)
    apps = applications(chain, result.diagram)
    assert apps == sorted(apps)
    assert len(apps) == 4


def test_model_check_budget(chain, start):
    with pytest.raises(BoundExceededError):
        is_model(chain, start, budget=0)


def test_conservativity_witness(witness_theory, start):
    """Test that a fact over input elements is explained by input facts and axiom instances"""
    result = chase_regular(witness_theory, start)
    a = start.domain[0]
    fact = Fact("B", (a,))
    witness = conservativity_witness(result, fact)
    assert witness.formula == Atom("A", ("x0",))
    assert witness.goal == Atom("B", ("x0",))
    assert witness.assignment() == {"x0": a}
    assert witness.premises == (Fact("A", (a,)),)
    assert [step.fact.relation for step in witness.derivation] == ["R", "B"]
    assert check_derivation(witness_theory, witness.premises, witness.derivation, fact)


def test_derivation_without_premises_fails(witness_theory, start):
    result = chase_regular(witness_theory, start)
    fact = Fact("B", (start.domain[0],))
    witness = conservativity_witness(result, fact)
    assert not check_derivation(witness_theory, (), witness.derivation, fact)


def test_witness_rejects_facts_on_fresh_elements(witness_theory, start):
    result = chase_regular(witness_theory, start)
    a = start.domain[0]
    fresh = result.trace.steps[0].fresh[0]
    with pytest.raises(WitnessError):
        conservativity_witness(result, Fact("R", (a, fresh)))
    with pytest.raises(WitnessError):
        conservativity_witness(result, Fact("A", (fresh,)))


def test_lift_into_a_model(witness_theory, start):
    result = chase_regular(witness_theory, start)
    a = start.domain[0]
    u = named(10, "u")
    m = generate(PreDiagram((u,), (Fact("A", (u,)), Fact("R", (u, u)), Fact("B", (u,)))))
    lifted = weak_reflection_lift(result, Homomorphism.of([(a, u)]), m)
    fresh = result.trace.steps[0].fresh[0]
    assert lifted.image(fresh) == (u,)
    assert lifted.image(a) == (u,)


def test_lift_into_a_cycle_needs_saturation(chain, start):
    a = start.domain[0]
    u, v = named(10, "u"), named(11, "v")
    cycle = generate(PreDiagram((u, v), (
        Fact("A", (u,)), Fact("A", (v,)), Fact("R", (u, v)), Fact("R", (v, u)),
    )))
    result = chase_regular(chain, start, fuel=4)
    with pytest.raises(LiftError):
        weak_reflection_lift(result, Homomorphism.of([(a, u)]), cycle)


def test_lift_rejects_non_models(witness_theory, start):
    result = chase_regular(witness_theory, start)
    u = named(10, "u")
    m = generate(PreDiagram((u,), (Fact("A", (u,)),)))
    with pytest.raises(LiftError):
        weak_reflection_lift(result, Homomorphism.of([(start.domain[0], u)]), m)
