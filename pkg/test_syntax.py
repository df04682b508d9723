import pytest

from errors import (
    ArityError,
    DuplicateRelationError,
    TheorySyntaxError,
    UnboundVariableError,
    UndeclaredRelationError,
)
from oracle import all_diagrams
from diagram import satisfies
from syntax import (
    FALSE,
    TRUE,
    Atom,
    Exists,
    Fragment,
    Sequent,
    Signature,
    alpha_equal,
    alpha_equal_sequents,
    canonical_context,
    canonical_parts,
    disj,
    enumerate_formulas,
    format_formula,
    format_sequent,
    formula_depth,
    normalize_sequent,
    parse_formula,
    parse_sequent,
    parse_theory,
    pretty_theory,
    substitute,
)

SIG = Signature((("A", 1), ("B", 1), ("C", 1), ("R", 2)))


def formula(text, signature=SIG):
    return parse_formula(text, signature)[0]


def test_single_falsum_axiom():
    """Test that an axiom with a falsum consequent keeps its context"""
    theory = parse_theory("rel B/1. axiom B(x) |- false.")
    assert theory.signature.arity("B") == 1
    assert theory.axioms == (Sequent(Atom("B", ("x",)), FALSE, ("x",)),)


def test_two_axiom_theory(bbar):
    assert bbar.name == "bbar"
    assert bbar.signature.names == ("B", "Bb", "R")
    assert len(bbar.axioms) == 3
    assert format_sequent(bbar.axioms[1]) == "B(x) |- exists y. R(x, y)"
    assert bbar.habitative
    assert bbar.fragment == Fragment.REGULAR_BOT


def test_arity_mismatch_reports_position():
    with pytest.raises(ArityError) as excinfo:
        parse_theory("rel P/1. axiom P(x,y) |- true.")
    assert excinfo.value.line == 1
    assert "arity 1" in str(excinfo.value)


def test_undeclared_relation():
    with pytest.raises(UndeclaredRelationError):
        parse_theory("rel A/1.\naxiom B(x) |- A(x).")


def test_duplicate_relation():
    with pytest.raises(DuplicateRelationError):
        parse_theory("rel A/1, A/2.")


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(TheorySyntaxError) as excinfo:
        parse_theory("rel A/1.\naxiom A(x) |- .")
    assert excinfo.value.line == 2
    assert excinfo.value.expected


def test_context_must_not_repeat():
    with pytest.raises(UnboundVariableError):
        parse_theory("rel A/1. axiom A(x) |- A(x) ctx x, x.")


def test_context_must_cover_free_variables():
    with pytest.raises(UnboundVariableError):
        parse_sequent("A(x) |- B(y) ctx x", SIG)


def test_canonical_context_order():
    assert canonical_context(formula("R(y,x) & R(x,x)")) == ("y", "x")
    assert canonical_context(formula("exists y. R(x,y)")) == ("x",)
    assert canonical_context(TRUE) == ()


def test_parsing_renames_shadowing_binders():
    s = parse_sequent("A(x) |- exists x. R(x,x)", SIG)
    assert s.context == ("x",)
    assert s.consequent == Exists("x'1", Atom("R", ("x'1", "x'1")))
    assert parse_sequent(format_sequent(s), SIG) == s
    assert formula("exists y. exists y. B(y)") == Exists("y", Exists("y'1", Atom("B", ("y'1",))))
    assert formula("exists y. R(x,y)") == Exists("y", Atom("R", ("x", "y")))
    theory = parse_theory("rel A/1. axiom A(x) & (exists x. A(x)) |- A(x).")
    assert theory.axioms[0].antecedent.right == Exists("x'1", Atom("A", ("x'1",)))


def test_parse_formula_with_context():
    f, context = parse_formula("A(x) ctx x, z", SIG)
    assert f == Atom("A", ("x",))
    assert context == ("x", "z")


def test_alpha_equality():
    assert alpha_equal(formula("exists y. R(x,y)"), formula("exists w. R(z,w)"))
    assert alpha_equal(formula("R(x,x)"), formula("R(x,x)"))
    assert not alpha_equal(formula("R(x,y)"), formula("R(y,x)"), ("x", "y"), ("x", "y"))


def test_horn_sequent_is_already_canonical():
    s = parse_sequent("A(x) & R(x,y) |- B(y)", SIG)
    parts = canonical_parts(s)
    assert len(parts) == 1
    assert parts[0].to_sequent() == s


def test_disjunctive_antecedent_splits():
    parts = canonical_parts(parse_sequent("A(x) | B(x) |- C(x)", SIG))
    assert [p.body for p in parts] == [(Atom("A", ("x",)),), (Atom("B", ("x",)),)]
    assert all(p.heads[0].atoms == (Atom("C", ("x",)),) for p in parts)


def test_existential_over_disjunction_distributes():
    s = parse_sequent("A(x) |- exists y. (R(x,y) & (B(y) | C(y)))", SIG)
    (part,) = canonical_parts(s)
    assert [h.variables for h in part.heads] == [("y",), ("y",)]
    assert [format_formula(h.formula()) for h in part.heads] == [
        "exists y. (R(x, y) & B(y))",
        "exists y. (R(x, y) & C(y))",
    ]


def test_normal_form_agrees_on_small_diagrams():
    """Test that the canonical heads are equivalent to the original consequent on every diagram up to size 2"""
    s = parse_sequent("A(x) |- exists y. (R(x,y) & (B(y) | C(y)))", SIG)
    (part,) = canonical_parts(s)
    normalized = disj(head.formula() for head in part.heads)
    for d in all_diagrams(SIG, 2):
        for e in d.representatives():
            assignment = {"x": e}
            assert satisfies(d, s.consequent, assignment) == satisfies(d, normalized, assignment)


def test_normalization_is_idempotent():
    s = parse_sequent("A(x) | B(x) |- exists y. (R(x,y) & (B(y) | C(y)))", SIG)
    normalized = normalize_sequent(s)
    assert len(normalized) == 2
    for n in normalized:
        (again,) = normalize_sequent(n)
        assert alpha_equal_sequents(again, n)


def test_pretty_printing_round_trip(bbar, fan, disj):
    for theory in (bbar, fan, disj):
        assert parse_theory(pretty_theory(theory)) == theory


def test_minimal_parentheses():
    sig = Signature((("A", 0), ("B", 0), ("C", 0)))
    assert format_formula(formula("(A | B) & C", sig)) == "(A | B) & C"
    assert format_formula(formula("A -> B -> C", sig)) == "A -> B -> C"
    assert format_formula(formula("(A -> B) -> C", sig)) == "(A -> B) -> C"
    assert format_formula(formula("A & (B & C)", sig)) == "A & (B & C)"


def test_explicit_context_is_printed():
    s = parse_sequent("A(x) |- true ctx x, y", SIG)
    assert s.context == ("x", "y")
    assert format_sequent(s) == "A(x) |- true ctx x, y"


def test_fragments(disj, witness_theory):
    assert disj.fragment == Fragment.POSITIVE_COHERENT
    assert witness_theory.fragment == Fragment.REGULAR
    assert parse_theory("rel A/1. axiom A(x) |- A(x).").fragment == Fragment.HORN
    assert parse_theory("rel A/1. axiom true |- forall x. A(x).").fragment == Fragment.FIRST_ORDER


def test_substitution_avoids_capture():
    renamed = substitute(formula("exists y. R(x,y)"), {"x": "y"})
    assert isinstance(renamed, Exists)
    assert renamed.var != "y"
    assert renamed.body == Atom("R", ("y", renamed.var))


def test_formula_family_sizes():
    sig = Signature((("A", 0),))
    atoms = enumerate_formulas(sig, 1, free=(), bound=(), equality=False)
    assert atoms == [TRUE, FALSE, Atom("A")]
    family = enumerate_formulas(sig, 2, free=(), bound=(), equality=False)
    assert len(family) == 30
    assert max(formula_depth(f) for f in family) == 2


def test_formula_family_respects_free_variables():
    family = enumerate_formulas(Signature((("R", 2),)), 2)
    assert all(set(canonical_context(f)) <= {"x"} for f in family)
    assert formula("exists y. R(x,y)", Signature((("R", 2),))) in family
