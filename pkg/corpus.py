"""Seeded generators for random theories, diagrams and homomorphisms"""

import random
from typing import List, Sequence, Tuple

from diagram import Diagram, DiagramBuilder, ElementId, Fact, Homomorphism
from syntax import TRUE, Atom, Formula, Sequent, Signature, Theory, conj, exists_chain, make_sequent

VARIABLES = ("x", "z", "w")


def random_signature(rng: random.Random, max_relations: int = 3, max_arity: int = 2) -> Signature:
    count = rng.randint(1, max_relations)
    return Signature(tuple((f"R{i}", rng.randint(1, max_arity)) for i in range(count)))


def _atom(rng: random.Random, name: str, arity: int, pool: Sequence[str]) -> Atom:
    return Atom(name, tuple(rng.choice(pool) for _ in range(arity)))


def _regular_axiom(rng: random.Random, signature: Signature) -> Sequent:
    """Heads only mention relations above every body relation, so the chase terminates"""
    relations = list(signature.relations)
    level = rng.randint(-1, len(relations) - 2)
    body: List[Formula] = []
    if level >= 0:
        body.append(_atom(rng, *relations[level], VARIABLES[:2]))
        if rng.random() < 0.4:
            lower = rng.randint(0, level)
            body.append(_atom(rng, *relations[lower], VARIABLES[:2]))
    antecedent = conj(body) if body else TRUE
    context = sorted({v for atom in body for v in atom.args})
    target = relations[rng.randint(level + 1, len(relations) - 1)]
    pool = list(context)
    witnesses: Tuple[str, ...] = ()
    if not pool or rng.random() < 0.5:
        witnesses = ("y",)
        pool.append("y")
    head = _atom(rng, *target, pool)
    if witnesses and "y" not in head.args:
        head = Atom(head.relation, ("y",) + head.args[1:])
    return make_sequent(antecedent, exists_chain(witnesses, head))


def random_regular_theory(rng: random.Random, max_axioms: int = 4, max_relations: int = 3,
                          max_arity: int = 2) -> Theory:
    signature = random_signature(rng, max_relations, max_arity)
    if len(signature.relations) == 1:
        signature = Signature(signature.relations + (("R1", 1),))
    axioms = tuple(_regular_axiom(rng, signature) for _ in range(rng.randint(1, max_axioms)))
    return Theory(signature, axioms, f"random{rng.randint(0, 9999)}")


def random_diagram(rng: random.Random, signature: Signature, max_elements: int = 3,
                   offset: int = 0, density: float = 0.3, equalities: bool = True) -> Diagram:
    builder = DiagramBuilder()
    elements = [builder.add_element(ElementId(offset + i)) for i in range(rng.randint(0, max_elements))]
    if not elements:
        return builder.freeze()
    for name, arity in signature.relations:
        for _ in range(len(elements) ** arity):
            if rng.random() < density:
                builder.add_fact(Fact(name, tuple(rng.choice(elements) for _ in range(arity))))
    if equalities and len(elements) > 1 and rng.random() < 0.3:
        a, b = rng.sample(elements, 2)
        builder.add_equality(a, b)
    return builder.freeze()


def random_homomorphism(rng: random.Random, signature: Signature,
                        max_elements: int = 3) -> Tuple[Homomorphism, Diagram, Diagram]:
    """A target diagram, a source pulled back along a random map, and the map as a relation"""
    target = random_diagram(rng, signature, max_elements, offset=0, density=0.5)
    while not target.domain:
        target = random_diagram(rng, signature, max_elements, offset=0, density=0.5)
    offset = target.next_serial + 10
    source_elements = [ElementId(offset + i) for i in range(rng.randint(1, max_elements))]
    image = {e: target.rep(rng.choice(target.domain)) for e in source_elements}
    builder = DiagramBuilder()
    for e in source_elements:
        builder.add_element(e)
    for name, arity in signature.relations:
        for _ in range(len(source_elements) ** arity):
            args = tuple(rng.choice(source_elements) for _ in range(arity))
            if target.holds(name, tuple(image[a] for a in args)) and rng.random() < 0.7:
                builder.add_fact(Fact(name, args))
    for a in source_elements:
        for b in source_elements:
            if a < b and image[a] == image[b] and rng.random() < 0.3:
                builder.add_equality(a, b)
    source = builder.freeze()
    h = Homomorphism.of((a, b) for a in source_elements for b in target.class_of(image[a]))
    return h, source, target


def random_query(rng: random.Random, signature: Signature) -> Sequent:
    relations = list(signature.relations)
    antecedent = _atom(rng, *rng.choice(relations), VARIABLES[:2])
    pool = sorted(set(antecedent.args)) + ["y"]
    head = _atom(rng, *rng.choice(relations), pool)
    consequent = exists_chain(("y",), head) if "y" in head.args else head
    return make_sequent(antecedent, consequent)
