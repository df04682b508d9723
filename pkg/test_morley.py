import pytest

from chase import chase_regular
from diagram import Diagram, ElementId, Fact
from errors import UnknownRelationError
from models import MorleyTarget
from morley import (
    ATOM,
    CONNECTIVE,
    DISJ,
    THRY,
    atomize,
    demorleyize_fact,
    derived_implications,
    derives,
    expected_axiom_count,
    morleyize,
    predicate_name,
    subformula_closure,
    unfold,
)
from syntax import TRUE, And, Atom, Fragment, Or, Sequent, parse_formula, parse_sequent, parse_theory


def formula(theory, text):
    return parse_formula(text, theory.signature)[0]


def test_closure_is_preorder_and_deduplicated(disj):
    a_or_b = formula(disj, "A | B")
    assert subformula_closure(disj) == (TRUE, a_or_b, Atom("A"), Atom("B"))
    assert subformula_closure(disj, [a_or_b, Atom("A")]) == subformula_closure(disj)


def test_predicate_names_ignore_bound_variables(witness_theory):
    left = formula(witness_theory, "exists y. R(x,y)")
    right = formula(witness_theory, "exists z. R(x,z)")
    assert predicate_name(left) == predicate_name(right)
    assert predicate_name(left).startswith("P#")
    assert predicate_name(left) != predicate_name(formula(witness_theory, "exists y. R(y,x)"))


def test_regular_target_on_a_disjunctive_theory(disj):
    tm = morleyize(disj)
    assert len(tm.result.axioms) == 9
    assert tm.tags[0] == THRY
    assert tm.tags.count(CONNECTIVE) == 2
    assert DISJ not in tm.tags
    assert tm.result.fragment.within(Fragment.REGULAR)
    assert tm.falsum is None
    assert tm.result.name == "disj_m"


def test_coherent_target_keeps_disjunction_schemas(disj):
    tm = morleyize(disj, target=MorleyTarget.COHERENT)
    assert len(tm.result.axioms) == 11
    assert tm.tags.count(DISJ) == 2
    assert tm.result.fragment.within(Fragment.COHERENT)


def test_axiom_count_matches_expectation(bbar, fan, witness_theory):
    for theory in (bbar, fan, witness_theory):
        for target in MorleyTarget:
            tm = morleyize(theory, target=target)
            assert len(tm.result.axioms) == expected_axiom_count(theory, tm.map.closure, target)


def test_falsum_is_named_and_explodes(bbar):
    tm = morleyize(bbar)
    assert tm.falsum == predicate_name(formula(bbar, "false"))
    assert tm.result.fragment.within(Fragment.REGULAR)
    b = tm.map.atom(formula(bbar, "B(x)"))
    assert b == Atom(predicate_name(Atom("B", ("x",))), ("x",))


def test_morleyized_signature_extends_the_base(witness_theory):
    tm = morleyize(witness_theory)
    names = tm.result.signature.names
    assert names[:3] == witness_theory.signature.names
    exists = formula(witness_theory, "exists y. R(x,y)")
    assert tm.result.signature.arity(predicate_name(exists)) == 1
    assert tm.map.aliases()[predicate_name(exists)] == "exists y. R(x, y)"


def test_regular_chase_of_a_disjunction_names_it_without_choosing(disj):
    tm = morleyize(disj)
    result = chase_regular(tm.result, Diagram.empty())
    a_or_b = tm.map.atom(formula(disj, "A | B"))
    assert result.diagram.holds(a_or_b.relation, ())
    assert not result.diagram.holds("A", ())
    assert not result.diagram.holds("B", ())


def test_unknown_formula_is_rejected(disj):
    tm = morleyize(disj)
    with pytest.raises(UnknownRelationError):
        tm.map.atom(formula(disj, "A & B"))
    with pytest.raises(UnknownRelationError):
        tm.map.formula("P#00000000")


def test_unfold_and_atomize(witness_theory):
    a_and_b = formula(witness_theory, "A(x) & B(x)")
    tm = morleyize(witness_theory, [a_and_b])
    m = tm.map
    folded = And(m.atom(Atom("A", ("x",))), m.atom(Atom("B", ("x",))))
    assert unfold(m, folded) == a_and_b
    assert atomize(m, folded) == m.atom(a_and_b)
    assert unfold(m, Or(Atom("A", ("x",)), TRUE)) == Or(Atom("A", ("x",)), TRUE)


def test_demorleyize_facts(witness_theory):
    tm = morleyize(witness_theory)
    e = ElementId(0)
    exists = formula(witness_theory, "exists y. R(x,y)")
    assert str(demorleyize_fact(tm.map, Fact(predicate_name(exists), (e,)))) == "exists y. R(e0, y)"
    assert str(demorleyize_fact(tm.map, Fact("A", (e,)))) == "A(e0)"
    with pytest.raises(UnknownRelationError):
        demorleyize_fact(tm.map, Fact("A", (e, e)))


def test_atom_schemas_are_tagged(witness_theory):
    tm = morleyize(witness_theory)
    atoms = [s for s, tag in zip(tm.result.axioms, tm.tags) if tag == ATOM]
    assert len(atoms) == 2 * 3


def test_extras_only_add_axioms(witness_theory):
    base = morleyize(witness_theory)
    larger = morleyize(witness_theory, [formula(witness_theory, "A(x) & B(x)")])
    assert {str(s) for s in base.result.axioms} < {str(s) for s in larger.result.axioms}


@pytest.fixture
def either():
    return parse_theory("rel A/0, B/0. axiom true |- A | B.")


def test_derives_uses_the_cover_search(either):
    assert derives(either, parse_sequent("A |- A", either.signature))
    assert derives(either, parse_sequent("false |- A", either.signature))
    assert derives(either, parse_sequent("true |- B | A", either.signature))
    assert not derives(either, parse_sequent("true |- A", either.signature))


def test_implication_and_commutation_instances(either):
    texts = ("A -> A", "true -> A", "false -> A", "B | A")
    extras = [formula(either, text) for text in texts]
    tm = morleyize(either, extras)
    atom = tm.map.atom
    axioms = set(tm.result.axioms)
    a_implies_a, true_implies_a, false_implies_a, b_or_a = extras
    assert Sequent(TRUE, atom(a_implies_a), ()) in axioms
    assert Sequent(TRUE, atom(false_implies_a), ()) in axioms
    assert Sequent(TRUE, atom(true_implies_a), ()) not in axioms
    assert Sequent(atom(Atom("A")), atom(true_implies_a), ()) in axioms
    assert Sequent(atom(formula(either, "A | B")), atom(b_or_a), ()) in axioms
    assert Sequent(atom(b_or_a), atom(formula(either, "A | B")), ()) in axioms
    assert derived_implications(either, tm.map.closure) == (a_implies_a, false_implies_a)
    assert len(tm.result.axioms) == expected_axiom_count(either, tm.map.closure, MorleyTarget.REGULAR)
    assert tm.result.fragment.within(Fragment.REGULAR)
