import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

from errors import DiagramError, FragmentError, InvalidHomomorphismError, UnboundVariableError
from models import DiagramModel, ElementModel, FactModel, FactRefModel, ProvenanceModel
from syntax import (
    And,
    Atom,
    Bottom,
    CanonicalAxiom,
    Eq,
    Exists,
    Formula,
    Or,
    Sequent,
    Top,
    canonical_context,
    canonical_parts,
    conjuncts,
    format_formula,
    is_horn,
)

logger = logging.getLogger(__name__)

EQUALITY = "="


@dataclass(frozen=True, order=True)
class ElementId:
    """Domain element; identity and order come from the serial alone"""
    serial: int
    gen: int = field(default=0, compare=False)
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name or f"e{self.serial}"


@dataclass(frozen=True, order=True)
class Fact:
    relation: str
    args: Tuple[ElementId, ...] = ()

    def __str__(self) -> str:
        if self.relation == EQUALITY:
            return f"{self.args[0]} = {self.args[1]}"
        if not self.args:
            return self.relation
        return f"{self.relation}({', '.join(str(a) for a in self.args)})"


class ProvenanceKind(str, Enum):
    INPUT = "input"
    AXIOM = "axiom"
    CLOSURE = "closure"


@dataclass(frozen=True)
class Provenance:
    kind: ProvenanceKind
    rule: Optional[str] = None
    axiom: Optional[int] = None
    disjunct: int = 0
    substitution: Tuple[Tuple[str, ElementId], ...] = ()
    parents: Tuple[Fact, ...] = ()


INPUT = Provenance(ProvenanceKind.INPUT)
REFLEXIVITY = Provenance(ProvenanceKind.CLOSURE, rule="refl")


def instantiate(atom: Formula, binding: Dict[str, ElementId]) -> Fact:
    try:
        if isinstance(atom, Atom):
            return Fact(atom.relation, tuple(binding[a] for a in atom.args))
        if isinstance(atom, Eq):
            return Fact(EQUALITY, (binding[atom.left], binding[atom.right]))
    except KeyError as e:
        raise UnboundVariableError(f"variable {e.args[0]} of {format_formula(atom)} is unbound") from None
    raise FragmentError(f"{format_formula(atom)} is not atomic")


@dataclass(frozen=True)
class PreDiagram:
    domain: Tuple[ElementId, ...] = ()
    facts: Tuple[Fact, ...] = ()

    def with_horn(self, formula: Formula, context: Sequence[str], elements: Sequence[ElementId]) -> "PreDiagram":
        """Add the conjuncts of a Horn fact instantiated at the given elements"""
        if not is_horn(formula):
            raise FragmentError(f"{format_formula(formula)} is not Horn")
        if len(context) != len(elements):
            raise DiagramError(f"context {list(context)} does not match {len(elements)} elements")
        binding = dict(zip(context, elements))
        added = tuple(instantiate(atom, binding) for atom in conjuncts(formula))
        return PreDiagram(self.domain, self.facts + added)


def horn_rules(axioms: Iterable[Union[Sequent, CanonicalAxiom]]) -> Tuple[CanonicalAxiom, ...]:
    rules: List[CanonicalAxiom] = []
    for index, axiom in enumerate(axioms):
        parts = [axiom] if isinstance(axiom, CanonicalAxiom) else canonical_parts(axiom, source=index)
        for part in parts:
            if not part.is_horn:
                raise FragmentError(f"{part} is not a Horn sequent")
            rules.append(part)
    return tuple(rules)


class DiagramBuilder:
    """Mutable congruence-closed fact store; freeze() yields an immutable Diagram"""

    def __init__(self, base: Optional["Diagram"] = None):
        self._domain: Dict[ElementId, None] = {}
        self._rep: Dict[ElementId, ElementId] = {}
        self._members: Dict[ElementId, List[ElementId]] = {}
        self._merged_into: Dict[ElementId, ElementId] = {}
        self._index: Dict[str, Set[Tuple[ElementId, ...]]] = defaultdict(set)
        self._provenance: Dict[Fact, Provenance] = {}
        self.next_serial = 0
        self.changed = False
        if base is not None:
            for e in base.domain:
                self._domain[e] = None
            self._rep = dict(base._rep)
            for e, r in self._rep.items():
                self._members.setdefault(r, []).append(e)
            self._merged_into = dict(base._merged_into)
            for relation, tuples in base._sets.items():
                self._index[relation] = set(tuples)
            self._provenance = dict(base._provenance)
            self.next_serial = base.next_serial

    # store protocol shared with Diagram

    def rep(self, e: ElementId) -> ElementId:
        try:
            return self._rep[e]
        except KeyError:
            raise DiagramError(f"element {e} is not in the domain") from None

    def representatives(self) -> List[ElementId]:
        return sorted(e for e, r in self._rep.items() if e == r)

    def tuples(self, relation: str) -> List[Tuple[ElementId, ...]]:
        return sorted(self._index.get(relation, ()))

    def holds(self, relation: str, args: Sequence[ElementId]) -> bool:
        if relation == EQUALITY:
            return self.rep(args[0]) == self.rep(args[1])
        return tuple(self.rep(a) for a in args) in self._index.get(relation, ())

    # mutation

    def add_element(self, e: ElementId) -> ElementId:
        if e in self._domain:
            return e
        self._domain[e] = None
        self._rep[e] = e
        self._members[e] = [e]
        self.next_serial = max(self.next_serial, e.serial + 1)
        self.changed = True
        return e

    def fresh(self, generation: int = 0, name: str = "") -> ElementId:
        return self.add_element(ElementId(self.next_serial, generation, name))

    def _path(self, e: ElementId) -> Tuple[Fact, ...]:
        edges = []
        while e in self._merged_into:
            parent = self._merged_into[e]
            edges.append(Fact(EQUALITY, (e, parent)))
            e = parent
        return tuple(edges)

    def add_fact(self, fact: Fact, provenance: Provenance = INPUT) -> bool:
        """Record a fact; returns whether the closed fact set grew"""
        if fact.relation == EQUALITY:
            return self.add_equality(fact.args[0], fact.args[1], provenance)
        key = tuple(self.rep(a) for a in fact.args)
        self._provenance.setdefault(fact, provenance)
        tuples = self._index[fact.relation]
        if key in tuples:
            return False
        tuples.add(key)
        normalized = Fact(fact.relation, key)
        if normalized != fact:
            parents = (fact,) + tuple(edge for a in fact.args for edge in self._path(a))
            self._provenance.setdefault(normalized, Provenance(ProvenanceKind.CLOSURE, rule="cong", parents=parents))
        self.changed = True
        return True

    def add_equality(self, a: ElementId, b: ElementId, provenance: Provenance = INPUT) -> bool:
        ra, rb = self.rep(a), self.rep(b)
        asserted = Fact(EQUALITY, (a, b))
        if a != b:
            self._provenance.setdefault(asserted, provenance)
        if ra == rb:
            return False
        winner, loser = (ra, rb) if ra < rb else (rb, ra)
        edge = Fact(EQUALITY, (loser, winner))
        if edge != asserted:
            parents = (asserted,) + self._path(a) + self._path(b)
            self._provenance.setdefault(edge, Provenance(ProvenanceKind.CLOSURE, rule="eq", parents=parents))
        self._merged_into[loser] = winner
        moved = self._members.pop(loser)
        for e in moved:
            self._rep[e] = winner
        self._members[winner].extend(moved)
        for relation, tuples in self._index.items():
            stale = [t for t in tuples if loser in t]
            for t in stale:
                tuples.discard(t)
                renamed = tuple(winner if x == loser else x for x in t)
                if renamed not in tuples:
                    tuples.add(renamed)
                    self._provenance.setdefault(
                        Fact(relation, renamed),
                        Provenance(ProvenanceKind.CLOSURE, rule="cong", parents=(Fact(relation, t), edge)),
                    )
        self.changed = True
        return True

    def close(self, rules: Sequence[CanonicalAxiom]) -> None:
        """Saturate under Horn rules over the fixed domain"""
        progress = True
        while progress:
            progress = False
            for rule in rules:
                for binding in list(match_atoms(self, rule.body, {}, rule.context)):
                    provenance = Provenance(
                        ProvenanceKind.AXIOM,
                        rule="horn",
                        axiom=rule.source,
                        substitution=tuple((v, binding[v]) for v in rule.context),
                        parents=tuple(instantiate(a, binding) for a in rule.body),
                    )
                    for atom in rule.heads[0].atoms:
                        if self.add_fact(instantiate(atom, binding), provenance):
                            progress = True

    def freeze(self) -> "Diagram":
        return Diagram(self._domain, self._rep, self._merged_into, self._index, self._provenance, self.next_serial)


class Diagram:
    """Immutable finite diagram: domain, congruence and representative-normalized atomic facts"""

    def __init__(self, domain: Iterable[ElementId], rep: Dict[ElementId, ElementId],
                 merged_into: Dict[ElementId, ElementId], index: Dict[str, Set[Tuple[ElementId, ...]]],
                 provenance: Dict[Fact, Provenance], next_serial: int):
        self._domain = tuple(sorted(domain))
        self._rep = dict(rep)
        self._merged_into = dict(merged_into)
        self._sets: Dict[str, FrozenSet[Tuple[ElementId, ...]]] = {
            relation: frozenset(tuples) for relation, tuples in sorted(index.items()) if tuples
        }
        self._sorted = {relation: tuple(sorted(tuples)) for relation, tuples in self._sets.items()}
        self._provenance = dict(provenance)
        self.next_serial = next_serial
        self._reps = tuple(e for e in self._domain if self._rep[e] == e)
        classes: Dict[ElementId, List[ElementId]] = defaultdict(list)
        for e in self._domain:
            classes[self._rep[e]].append(e)
        self._classes = {r: tuple(members) for r, members in classes.items()}

    @classmethod
    def empty(cls) -> "Diagram":
        return cls((), {}, {}, {}, {}, 0)

    @property
    def domain(self) -> Tuple[ElementId, ...]:
        return self._domain

    @property
    def generation(self) -> int:
        return max((e.gen for e in self._domain), default=0)

    @property
    def relations(self) -> Tuple[str, ...]:
        return tuple(self._sets)

    def builder(self) -> DiagramBuilder:
        return DiagramBuilder(self)

    def rep(self, e: ElementId) -> ElementId:
        try:
            return self._rep[e]
        except KeyError:
            raise DiagramError(f"element {e} is not in the domain") from None

    def representatives(self) -> Tuple[ElementId, ...]:
        return self._reps

    def class_of(self, e: ElementId) -> Tuple[ElementId, ...]:
        return self._classes[self.rep(e)]

    def classes(self) -> Tuple[Tuple[ElementId, ...], ...]:
        return tuple(self._classes[r] for r in self._reps)

    def tuples(self, relation: str) -> Tuple[Tuple[ElementId, ...], ...]:
        return self._sorted.get(relation, ())

    def holds(self, relation: str, args: Sequence[ElementId]) -> bool:
        if relation == EQUALITY:
            return self.rep(args[0]) == self.rep(args[1])
        return tuple(self.rep(a) for a in args) in self._sets.get(relation, ())

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Fact):
            return all(a in self._rep for a in item.args) and self.holds(item.relation, item.args)
        return item in self._rep

    def __len__(self) -> int:
        return len(self._domain)

    def is_exploding(self, falsum: Optional[str]) -> bool:
        return falsum is not None and self.holds(falsum, ())

    def atoms(self) -> Tuple[Fact, ...]:
        """Stored relational facts over class representatives"""
        return tuple(Fact(relation, t) for relation, tuples in self._sorted.items() for t in tuples)

    def equalities(self) -> Tuple[Fact, ...]:
        """Union-find edges; their closure is the congruence"""
        return tuple(sorted(Fact(EQUALITY, (e, w)) for e, w in self._merged_into.items()))

    def facts(self) -> Tuple[Fact, ...]:
        """The full congruence-closed fact set, reflexive equalities included"""
        out: List[Fact] = []
        for members in self.classes():
            out.extend(Fact(EQUALITY, pair) for pair in product(members, repeat=2))
        for fact in self.atoms():
            for args in product(*(self.class_of(a) for a in fact.args)):
                out.append(Fact(fact.relation, args))
        return tuple(sorted(out))

    def provenance(self, fact: Fact) -> Optional[Provenance]:
        if fact not in self:
            return None
        recorded = self._provenance.get(fact)
        if recorded is not None:
            return recorded
        if fact.relation == EQUALITY:
            a, b = fact.args
            if a == b:
                return REFLEXIVITY
            return Provenance(ProvenanceKind.CLOSURE, rule="eq", parents=self._path(a) + self._path(b))
        normalized = Fact(fact.relation, tuple(self.rep(a) for a in fact.args))
        parents = (normalized,) + tuple(edge for a in fact.args for edge in self._path(a))
        return Provenance(ProvenanceKind.CLOSURE, rule="cong", parents=parents)

    def _path(self, e: ElementId) -> Tuple[Fact, ...]:
        edges = []
        while e in self._merged_into:
            parent = self._merged_into[e]
            edges.append(Fact(EQUALITY, (e, parent)))
            e = parent
        return tuple(edges)

    def element(self, serial: int) -> ElementId:
        probe = ElementId(serial)
        for e in self._domain:
            if e == probe:
                return e
        raise DiagramError(f"no element with id {serial}")

    def with_facts(self, facts: Iterable[Fact], provenance: Provenance = INPUT,
                   rules: Sequence[CanonicalAxiom] = ()) -> "Diagram":
        builder = self.builder()
        for fact in facts:
            for a in fact.args:
                builder.add_element(a)
            builder.add_fact(fact, provenance)
        builder.close(rules)
        return builder.freeze()

    def as_pre_diagram(self) -> PreDiagram:
        return PreDiagram(self._domain, self.equalities() + self.atoms())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._domain == other._domain and self._rep == other._rep and self._sets == other._sets

    def __hash__(self) -> int:
        return hash((self._domain, frozenset(self._sets.items())))

    def __str__(self) -> str:
        facts = [str(f) for f in self.equalities() + self.atoms()]
        return "{" + ", ".join(str(e) for e in self._domain) + "; " + ", ".join(facts) + "}"

    def __repr__(self) -> str:
        return f"Diagram({self})"

    # --- JSON ---

    def to_model(self) -> DiagramModel:
        facts = sorted(self.equalities() + self.atoms(), key=_fact_sort_key)
        return DiagramModel(
            domain=[ElementModel(id=e.serial, gen=e.gen, name=str(e)) for e in self._domain],
            facts=[FactModel(rel=f.relation, args=[a.serial for a in f.args],
                             prov=_provenance_model(self._provenance.get(f, INPUT))) for f in facts],
        )

    @classmethod
    def from_model(cls, model: DiagramModel) -> "Diagram":
        builder = DiagramBuilder()
        by_serial: Dict[int, ElementId] = {}
        for item in model.domain:
            name = "" if item.name == f"e{item.id}" else item.name
            e = ElementId(item.id, item.gen, name)
            if e in by_serial.values():
                raise DiagramError(f"element id {item.id} appears twice")
            by_serial[item.id] = e
            builder.add_element(e)

        def lookup(serial: int) -> ElementId:
            if serial not in by_serial:
                raise DiagramError(f"fact refers to unknown element {serial}")
            return by_serial[serial]

        def to_fact(rel: str, args: Sequence[int]) -> Fact:
            if rel == EQUALITY and len(args) != 2:
                raise DiagramError("equality facts take two arguments")
            return Fact(rel, tuple(lookup(a) for a in args))

        def to_provenance(prov: Optional[ProvenanceModel]) -> Provenance:
            if prov is None:
                return INPUT
            return Provenance(
                ProvenanceKind(prov.kind),
                rule=prov.rule,
                axiom=prov.axiom,
                disjunct=prov.disjunct,
                substitution=tuple((v, lookup(s)) for v, s in prov.subst),
                parents=tuple(to_fact(p.rel, p.args) for p in prov.parents),
            )

        equalities = [f for f in model.facts if f.rel == EQUALITY]
        # descending loser order rebuilds the exact union-find forest
        equalities.sort(key=lambda f: (-f.args[0], f.args[1:]))
        for item in equalities + [f for f in model.facts if f.rel != EQUALITY]:
            builder.add_fact(to_fact(item.rel, item.args), to_provenance(item.prov))
        return builder.freeze()


def _fact_sort_key(fact: Fact):
    return fact.relation, tuple(a.serial for a in fact.args)


def _fact_ref(fact: Fact) -> FactRefModel:
    return FactRefModel(rel=fact.relation, args=[a.serial for a in fact.args])


def _provenance_model(provenance: Provenance) -> ProvenanceModel:
    return ProvenanceModel(
        kind=provenance.kind.value,
        rule=provenance.rule,
        axiom=provenance.axiom,
        disjunct=provenance.disjunct,
        subst=[(v, e.serial) for v, e in provenance.substitution],
        parents=[_fact_ref(p) for p in provenance.parents],
    )


Store = Union[Diagram, DiagramBuilder]


# --- matching and satisfaction --------------------------------------------

def match_atoms(store: Store, atoms: Sequence[Formula], binding: Optional[Dict[str, ElementId]] = None,
                free: Sequence[str] = ()) -> Iterator[Dict[str, ElementId]]:
    """All extensions of binding (over representatives) making every Horn atom hold"""
    start = {v: store.rep(e) for v, e in (binding or {}).items()}
    relational: List[Atom] = []
    equalities: List[Eq] = []
    for atom in atoms:
        if isinstance(atom, Atom):
            relational.append(atom)
        elif isinstance(atom, Eq):
            equalities.append(atom)
        elif not isinstance(atom, Top):
            raise FragmentError(f"{format_formula(atom)} is not a Horn atom")
    # bound atoms first narrows the search
    relational.sort(key=lambda a: -sum(1 for v in a.args if v in start))
    yield from _match_relational(store, relational, 0, start, equalities, tuple(free))


def _match_relational(store: Store, atoms: List[Atom], i: int, binding: Dict[str, ElementId],
                      equalities: List[Eq], free: Tuple[str, ...]) -> Iterator[Dict[str, ElementId]]:
    if i == len(atoms):
        yield from _match_equalities(store, equalities, binding, free)
        return
    atom = atoms[i]
    for t in store.tuples(atom.relation):
        extended = dict(binding)
        for var, e in zip(atom.args, t):
            if extended.setdefault(var, e) != e:
                break
        else:
            yield from _match_relational(store, atoms, i + 1, extended, equalities, free)


def _match_equalities(store: Store, equalities: List[Eq], binding: Dict[str, ElementId],
                      free: Tuple[str, ...]) -> Iterator[Dict[str, ElementId]]:
    binding = dict(binding)
    todo = list(equalities)
    progress = True
    while progress:
        progress = False
        rest: List[Eq] = []
        for eq in todo:
            left, right = binding.get(eq.left), binding.get(eq.right)
            if left is not None and right is not None:
                if left != right:
                    return
            elif left is not None:
                binding[eq.right] = left
                progress = True
            elif right is not None:
                binding[eq.left] = right
                progress = True
            else:
                rest.append(eq)
        todo = rest
    if todo:
        eq = todo[0]
        for e in store.representatives():
            yield from _match_equalities(store, todo, {**binding, eq.left: e, eq.right: e}, free)
        return
    unbound = [v for v in free if v not in binding]
    for combo in product(store.representatives(), repeat=len(unbound)):
        yield {**binding, **dict(zip(unbound, combo))}


def satisfies(store: Store, f: Formula, assignment: Dict[str, ElementId], falsum: Optional[str] = None) -> bool:
    """Tarski satisfaction of a positive-coherent formula; the falsum relation, when given, reads ⊥"""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return falsum is not None and store.holds(falsum, ())
    if isinstance(f, (Atom, Eq)):
        fact = instantiate(f, assignment)
        return store.holds(fact.relation, fact.args)
    if isinstance(f, And):
        return satisfies(store, f.left, assignment, falsum) and satisfies(store, f.right, assignment, falsum)
    if isinstance(f, Or):
        return satisfies(store, f.left, assignment, falsum) or satisfies(store, f.right, assignment, falsum)
    if isinstance(f, Exists):
        return any(satisfies(store, f.body, {**assignment, f.var: e}, falsum) for e in store.representatives())
    raise FragmentError(f"{format_formula(f)} is outside the positive-coherent fragment")


def sequent_holds(store: Store, s: Union[Sequent, CanonicalAxiom], falsum: Optional[str] = None) -> bool:
    """Whether a positive-coherent sequent holds under every assignment of its context"""
    if isinstance(s, CanonicalAxiom):
        s = s.to_sequent()
    for combo in product(store.representatives(), repeat=len(s.context)):
        assignment = dict(zip(s.context, combo))
        if satisfies(store, s.antecedent, assignment, falsum) and not satisfies(store, s.consequent, assignment, falsum):
            return False
    return True


# --- generation and extension ---------------------------------------------

def generate(pre: PreDiagram, horn_axioms: Sequence[Union[Sequent, CanonicalAxiom]] = ()) -> Diagram:
    """Least diagram containing a pre-diagram, closed under the Horn axioms"""
    rules = horn_rules(horn_axioms)
    builder = DiagramBuilder()
    for e in pre.domain:
        builder.add_element(e)
    for fact in pre.facts:
        for a in fact.args:
            if a not in builder._domain:
                raise DiagramError(f"fact {fact} mentions {a} outside the domain")
        builder.add_fact(fact)
    builder.close(rules)
    return builder.freeze()


def extend(d: Diagram, horn: Formula, context: Sequence[str], olds: Sequence[ElementId], fresh_count: int,
           horn_axioms: Sequence[Union[Sequent, CanonicalAxiom]] = (),
           provenance: Provenance = INPUT, names: Sequence[str] = ()) -> Tuple[Diagram, Tuple[ElementId, ...]]:
    """Finitary extension that also reports the fresh elements"""
    if not is_horn(horn):
        raise FragmentError(f"{format_formula(horn)} is not Horn")
    context = tuple(context)
    if len(context) != len(olds) + fresh_count:
        raise DiagramError(f"context {list(context)} does not split into {len(olds)} old and {fresh_count} fresh")
    stray = [v for v in canonical_context(horn) if v not in context]
    if stray:
        raise DiagramError(f"variables {stray} are not in the context")
    for e in olds:
        d.rep(e)
    builder = d.builder()
    generation = d.generation + 1
    fresh = tuple(
        builder.fresh(generation, names[i] if i < len(names) else "") for i in range(fresh_count)
    )
    binding = dict(zip(context, tuple(olds) + fresh))
    for atom in conjuncts(horn):
        builder.add_fact(instantiate(atom, binding), provenance)
    builder.close(horn_rules(horn_axioms))
    return builder.freeze(), fresh


def finitary_extension(d: Diagram, horn: Formula, context: Sequence[str], olds: Sequence[ElementId],
                       fresh_count: int, horn_axioms: Sequence[Union[Sequent, CanonicalAxiom]] = ()) -> Diagram:
    return extend(d, horn, context, olds, fresh_count, horn_axioms)[0]


def is_subdiagram(d: Diagram, other: Diagram) -> bool:
    if any(e not in other for e in d.domain):
        return False
    return all(other.holds(f.relation, f.args) for f in d.equalities() + d.atoms())


def rename_apart(d: Diagram, avoid: Diagram) -> Tuple[Diagram, Dict[ElementId, ElementId]]:
    """Isomorphic copy of d whose serials are disjoint from avoid's"""
    offset = max(d.next_serial, avoid.next_serial)
    mapping = {e: ElementId(offset + i, e.gen) for i, e in enumerate(d.domain)}
    builder = DiagramBuilder()
    for e in d.domain:
        builder.add_element(mapping[e])
    renamed = Provenance(ProvenanceKind.INPUT, rule="rename")
    for fact in sorted(d.equalities(), key=lambda f: (-f.args[0].serial, f.args[1].serial)):
        builder.add_fact(Fact(EQUALITY, tuple(mapping[a] for a in fact.args)), renamed)
    for fact in d.atoms():
        builder.add_fact(Fact(fact.relation, tuple(mapping[a] for a in fact.args)), renamed)
    return builder.freeze(), mapping


# --- homomorphisms --------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """A left-total relation between domains"""
    pairs: FrozenSet[Tuple[ElementId, ElementId]]

    @classmethod
    def of(cls, pairs: Iterable[Tuple[ElementId, ElementId]]) -> "Homomorphism":
        return cls(frozenset(pairs))

    def image(self, e: ElementId) -> Tuple[ElementId, ...]:
        return tuple(sorted(b for a, b in self.pairs if a == e))

    def then(self, other: "Homomorphism") -> "Homomorphism":
        """Relational composite: self first, then other"""
        forward: Dict[ElementId, List[ElementId]] = defaultdict(list)
        for b, c in other.pairs:
            forward[b].append(c)
        return Homomorphism(frozenset((a, c) for a, b in self.pairs for c in forward.get(b, ())))

    def __str__(self) -> str:
        return "{" + ", ".join(f"({a}, {b})" for a, b in sorted(self.pairs)) + "}"


def compose(first: Homomorphism, second: Homomorphism) -> Homomorphism:
    return first.then(second)


def check_homomorphism(h: Homomorphism, d1: Diagram, d2: Diagram) -> bool:
    images: Dict[ElementId, Set[ElementId]] = defaultdict(set)
    for a, b in h.pairs:
        if a not in d1 or b not in d2:
            return False
        images[a].add(b)
    if any(e not in images for e in d1.domain):
        return False
    for targets in images.values():
        if len({d2.rep(b) for b in targets}) != 1:
            return False
        for b in list(targets):
            if not set(d2.class_of(b)) <= targets:
                return False
    for fact in d1.facts():
        for combo in product(*(sorted(images[a]) for a in fact.args)):
            if not d2.holds(fact.relation, combo):
                return False
    return True


def congruence(d: Diagram) -> Homomorphism:
    return Homomorphism(frozenset((x, y) for x in d.domain for y in d.class_of(x)))


def inclusion_hom(d: Diagram, other: Diagram) -> Homomorphism:
    if not is_subdiagram(d, other):
        raise DiagramError("diagram is not included in the target")
    return Homomorphism(frozenset((x, y) for x in d.domain for y in other.class_of(x)))


class MergeResult(NamedTuple):
    diagram: Diagram
    inclusion: Homomorphism
    into: Homomorphism
    retraction: Homomorphism


def merge_along_hom(h: Homomorphism, d0: Diagram, d1: Diagram) -> MergeResult:
    """Glue d0 onto d1 along h; returns the merged diagram with its inclusion, embedding and retraction"""
    shared = set(d0.domain) & set(d1.domain)
    if shared:
        raise DiagramError(f"domains share {sorted(shared)}; rename apart first")
    if not check_homomorphism(h, d0, d1):
        raise InvalidHomomorphismError("h is not a homomorphism from d0 to d1")
    for members in d0.classes():
        targets = {d1.rep(b) for e in members for b in h.image(e)}
        if len(targets) > 1:
            raise InvalidHomomorphismError(f"h sends the class of {members[0]} to distinct elements of d1")

    builder = d0.builder()
    for e in d1.domain:
        builder.add_element(e)
    for fact in d1.equalities() + d1.atoms():
        builder.add_fact(fact, d1._provenance.get(fact, INPUT))
    glue = Provenance(ProvenanceKind.INPUT, rule="glue")
    for a, b in sorted(h.pairs):
        builder.add_equality(a, b, glue)
    merged = builder.freeze()

    inclusion = inclusion_hom(d0, merged)
    into = inclusion_hom(d1, merged)
    retraction = Homomorphism(frozenset(
        [(x, y) for x in d1.domain for y in d1.class_of(x)] + list(h.pairs)
    ))
    if not check_homomorphism(retraction, merged, d1):
        raise InvalidHomomorphismError("retraction is not a homomorphism")
    if inclusion != h.then(into):
        raise InvalidHomomorphismError("triangle does not commute")
    if into.then(retraction) != congruence(d1):
        raise InvalidHomomorphismError("retraction does not split the embedding")
    logger.debug(f"Merged {len(d0)} + {len(d1)} elements into {len(merged.representatives())} classes")
    return MergeResult(merged, inclusion, into, retraction)


# --- quotient structures --------------------------------------------------

@dataclass
class Structure:
    """Plain structure with identity equality; elements are indices into universe"""
    universe: List[Tuple[ElementId, ...]]
    relations: Dict[str, Set[Tuple[int, ...]]]

    def index_of(self, e: ElementId) -> int:
        for i, members in enumerate(self.universe):
            if e in members:
                return i
        raise DiagramError(f"element {e} is not in the structure")


def quotient(d: Diagram) -> Structure:
    classes = list(d.classes())
    position = {members[0]: i for i, members in enumerate(classes)}
    relations: Dict[str, Set[Tuple[int, ...]]] = {
        relation: {tuple(position[d.rep(a)] for a in t) for t in d.tuples(relation)} for relation in d.relations
    }
    return Structure(classes, relations)


def structure_satisfies(structure: Structure, f: Formula, assignment: Dict[str, int],
                        falsum: Optional[str] = None) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return falsum is not None and () in structure.relations.get(falsum, ())
    if isinstance(f, (Atom, Eq)):
        try:
            if isinstance(f, Eq):
                return assignment[f.left] == assignment[f.right]
            return tuple(assignment[a] for a in f.args) in structure.relations.get(f.relation, ())
        except KeyError as e:
            raise UnboundVariableError(f"variable {e.args[0]} is unbound") from None
    if isinstance(f, And):
        return (structure_satisfies(structure, f.left, assignment, falsum)
                and structure_satisfies(structure, f.right, assignment, falsum))
    if isinstance(f, Or):
        return (structure_satisfies(structure, f.left, assignment, falsum)
                or structure_satisfies(structure, f.right, assignment, falsum))
    if isinstance(f, Exists):
        return any(structure_satisfies(structure, f.body, {**assignment, f.var: i}, falsum)
                   for i in range(len(structure.universe)))
    raise FragmentError(f"{format_formula(f)} is outside the positive-coherent fragment")
