import pytest

from diagram import (
    EQUALITY,
    Diagram,
    DiagramBuilder,
    ElementId,
    Fact,
    Homomorphism,
    PreDiagram,
    check_homomorphism,
    compose,
    extend,
    finitary_extension,
    generate,
    is_subdiagram,
    merge_along_hom,
    quotient,
    rename_apart,
    satisfies,
    sequent_holds,
    structure_satisfies,
)
from errors import DiagramError, FragmentError, InvalidHomomorphismError
from syntax import And, Atom, Exists, Or, Sequent

R_XY = Atom("R", ("x", "y"))


def element(serial, name=""):
    return ElementId(serial, 0, name)


@pytest.fixture
def edge():
    """Two elements joined by R"""
    a, b = element(0, "a"), element(1, "b")
    return generate(PreDiagram((a, b), (Fact("R", (a, b)),)))


def test_element_naming():
    assert str(ElementId(3)) == "e3"
    assert str(element(3, "c")) == "c"
    assert element(3, "c") == ElementId(3)


def test_generate_closes_under_horn_axioms(edge):
    a, b = edge.domain
    closed = generate(edge.as_pre_diagram(), [Sequent(R_XY, Atom("S", ("y",)), ("x", "y"))])
    assert closed.holds("S", (b,))
    assert not closed.holds("S", (a,))
    assert closed.provenance(Fact("S", (b,))).axiom == 0


def test_generate_is_idempotent(edge):
    rules = [Sequent(R_XY, Atom("S", ("y",)), ("x", "y")), Sequent(Atom("S", ("x",)), Atom("T", ("x",)), ("x",))]
    once = generate(edge.as_pre_diagram(), rules)
    assert generate(once.as_pre_diagram(), rules).facts() == once.facts()


def test_generate_rejects_foreign_elements():
    a, b = element(0), element(1)
    with pytest.raises(DiagramError):
        generate(PreDiagram((a,), (Fact("R", (a, b)),)))


def test_generate_rejects_non_horn_axioms(edge):
    with pytest.raises(FragmentError):
        generate(edge.as_pre_diagram(), [Sequent(R_XY, Or(Atom("S", ("x",)), Atom("S", ("y",))), ("x", "y"))])


def test_equality_merges_classes():
    """Test that the smaller serial becomes the representative and facts follow it"""
    builder = DiagramBuilder()
    a, b = builder.fresh(name="a"), builder.fresh(name="b")
    builder.add_fact(Fact("R", (b, b)))
    builder.add_equality(b, a)
    d = builder.freeze()
    assert d.rep(b) == a
    assert d.representatives() == (a,)
    assert d.atoms() == (Fact("R", (a, a)),)
    assert Fact(EQUALITY, (a, b)) in d.facts()
    assert Fact("R", (a, b)) in d
    assert d.provenance(Fact("R", (a, a))).rule == "cong"


def test_extend_adds_fresh_elements(edge):
    a, b = edge.domain
    grown, fresh = extend(edge, And(R_XY, Atom("B", ("y",))), ("x", "y"), (b,), 1)
    (f,) = fresh
    assert f.serial == 2
    assert f.gen == 1
    assert grown.holds("R", (b, f))
    assert grown.holds("B", (f,))
    assert is_subdiagram(edge, grown)
    assert not is_subdiagram(grown, edge)
    assert finitary_extension(edge, And(R_XY, Atom("B", ("y",))), ("x", "y"), (b,), 1) == grown


def test_extend_checks_context_split(edge):
    a, _ = edge.domain
    with pytest.raises(DiagramError):
        extend(edge, R_XY, ("x", "y"), (a,), 0)
    with pytest.raises(FragmentError):
        extend(edge, Or(Atom("B", ("x",)), Atom("C", ("x",))), ("x",), (a,), 0)


def test_satisfaction(edge):
    a, b = edge.domain
    assert satisfies(edge, Exists("y", R_XY), {"x": a})
    assert not satisfies(edge, Exists("y", R_XY), {"x": b})
    assert sequent_holds(edge, Sequent(R_XY, Exists("z", Atom("R", ("x", "z"))), ("x", "y")))
    assert not sequent_holds(edge, Sequent(R_XY, Atom("R", ("y", "x")), ("x", "y")))


def test_model_round_trip_keeps_congruence():
    builder = DiagramBuilder()
    a, b, c = builder.fresh(), builder.fresh(), builder.fresh()
    builder.add_fact(Fact("R", (a, c)))
    builder.add_equality(c, b)
    d = builder.freeze()
    assert Diagram.from_model(d.to_model()) == d


def test_homomorphism_check(edge):
    a, b = edge.domain
    loop = generate(PreDiagram((element(5, "u"),), (Fact("R", (element(5), element(5))),)))
    u = loop.domain[0]
    assert check_homomorphism(Homomorphism.of([(a, u), (b, u)]), edge, loop)
    assert not check_homomorphism(Homomorphism.of([(a, u)]), edge, loop)
    bare = generate(PreDiagram((u,)))
    assert not check_homomorphism(Homomorphism.of([(a, u), (b, u)]), edge, bare)


def test_homomorphisms_preserve_equalities():
    builder = DiagramBuilder()
    a, b = builder.add_element(element(0, "a")), builder.add_element(element(1, "b"))
    builder.add_equality(a, b)
    glued = builder.freeze()
    x, y = element(5, "x"), element(6, "y")
    discrete = generate(PreDiagram((x, y)))
    assert not check_homomorphism(Homomorphism.of([(a, x), (b, y)]), glued, discrete)
    assert not check_homomorphism(Homomorphism.of([(a, x), (a, y), (b, x), (b, y)]), glued, discrete)
    assert check_homomorphism(Homomorphism.of([(a, x), (b, x)]), glued, discrete)
    with pytest.raises(InvalidHomomorphismError):
        merge_along_hom(Homomorphism.of([(a, x), (b, y)]), glued, discrete)


def test_merge_along_hom():
    a, x = element(0, "a"), element(5, "x")
    d0 = generate(PreDiagram((a,), (Fact("A", (a,)),)))
    d1 = generate(PreDiagram((x,), (Fact("A", (x,)), Fact("B", (x,)))))
    h = Homomorphism.of([(a, x)])
    merged = merge_along_hom(h, d0, d1)
    assert merged.diagram.holds("B", (a,))
    assert len(merged.diagram.representatives()) == 1
    assert compose(h, merged.into) == merged.inclusion
    assert check_homomorphism(merged.retraction, merged.diagram, d1)


def test_merge_requires_disjoint_domains(edge):
    with pytest.raises(DiagramError):
        merge_along_hom(Homomorphism.of([(e, e) for e in edge.domain]), edge, edge)


def test_merge_rejects_non_homomorphism():
    a, x = element(0, "a"), element(5, "x")
    d0 = generate(PreDiagram((a,), (Fact("B", (a,)),)))
    d1 = generate(PreDiagram((x,), (Fact("A", (x,)),)))
    with pytest.raises(InvalidHomomorphismError):
        merge_along_hom(Homomorphism.of([(a, x)]), d0, d1)


def test_rename_apart(edge):
    copy, mapping = rename_apart(edge, edge)
    assert not set(copy.domain) & set(edge.domain)
    a, b = edge.domain
    assert copy.holds("R", (mapping[a], mapping[b]))


def test_quotient_structure():
    builder = DiagramBuilder()
    a, b = builder.fresh(), builder.fresh()
    builder.add_fact(Fact("R", (a, b)))
    builder.add_equality(a, b)
    structure = quotient(builder.freeze())
    assert len(structure.universe) == 1
    assert structure.relations["R"] == {(0, 0)}
    assert structure.index_of(b) == 0
    assert structure_satisfies(structure, Exists("x", Atom("R", ("x", "x"))), {})
