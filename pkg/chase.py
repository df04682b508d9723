import logging
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Deque, Dict, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

from diagram import (
    EQUALITY,
    Diagram,
    DiagramBuilder,
    ElementId,
    Fact,
    Homomorphism,
    Provenance,
    ProvenanceKind,
    check_homomorphism,
    inclusion_hom,
    instantiate,
    match_atoms,
)
from errors import BoundExceededError, ChaseError, EngineError, FragmentError, LiftError, WitnessError
from models import ChaseStatus, ChaseTraceModel, ElementModel, FactRefModel, TraceStepModel
from syntax import TRUE, Atom, CanonicalAxiom, Eq, Formula, Theory, canonical_axioms, conj

logger = logging.getLogger(__name__)

SCHEDULE = "restricted-round-robin"

Axioms = Union[Theory, Sequence[CanonicalAxiom]]


def as_axioms(t: Axioms) -> Tuple[CanonicalAxiom, ...]:
    if isinstance(t, Theory):
        return canonical_axioms(t)
    return t if isinstance(t, tuple) else tuple(t)


def regular_axioms(t: Axioms) -> Tuple[CanonicalAxiom, ...]:
    axioms = as_axioms(t)
    for axiom in axioms:
        if not axiom.is_regular:
            raise FragmentError(f"{axiom} is not a regular sequent")
    return axioms


@dataclass(frozen=True, order=True)
class Application:
    """A match of an axiom's antecedent; substitution follows the axiom context"""
    axiom: int
    substitution: Tuple[ElementId, ...]
    disjunct: int = 0

    def binding(self, axiom: CanonicalAxiom) -> Dict[str, ElementId]:
        return dict(zip(axiom.context, self.substitution))


def applications(t: Axioms, d: Union[Diagram, DiagramBuilder]) -> List[Application]:
    """Every antecedent match, ordered by axiom index then substitution"""
    axioms = as_axioms(t)
    found: Set[Application] = set()
    for index, axiom in enumerate(axioms):
        for binding in match_atoms(d, axiom.body, {}, axiom.context):
            found.add(Application(index, tuple(binding[v] for v in axiom.context)))
    return sorted(found)


def is_redundant(app: Application, t: Axioms, d: Union[Diagram, DiagramBuilder]) -> bool:
    """Whether some disjunct of the consequent already holds under the application"""
    axiom = as_axioms(t)[app.axiom]
    binding = app.binding(axiom)
    for head in axiom.heads:
        for _ in match_atoms(d, head.atoms, binding, head.variables):
            return True
    return False


def _normalized(app: Application, store: Union[Diagram, DiagramBuilder]) -> Application:
    return Application(app.axiom, tuple(store.rep(e) for e in app.substitution), app.disjunct)


def apply(builder: DiagramBuilder, axioms: Sequence[CanonicalAxiom],
          app: Application) -> Tuple[Tuple[Fact, ...], Tuple[ElementId, ...]]:
    """Fire one disjunct of an application; returns the new facts and the fresh elements"""
    axiom = axioms[app.axiom]
    if not axiom.heads:
        raise ChaseError(f"axiom {app.axiom} has a falsum consequent and cannot fire")
    head = axiom.heads[app.disjunct]
    binding = app.binding(axiom)
    generation = 1 + max((e.gen for e in app.substitution), default=0)
    fresh = []
    for var in head.variables:
        element = builder.fresh(generation)
        binding[var] = element
        fresh.append(element)
    provenance = Provenance(
        ProvenanceKind.AXIOM,
        rule="chase",
        axiom=app.axiom,
        disjunct=app.disjunct,
        substitution=tuple((v, binding[v]) for v in axiom.context + head.variables),
        parents=tuple(instantiate(atom, binding) for atom in axiom.body),
    )
    added = []
    for atom in head.atoms:
        fact = instantiate(atom, binding)
        if builder.add_fact(fact, provenance):
            added.append(fact)
    return tuple(added), tuple(fresh)


@dataclass(frozen=True)
class TraceStep:
    step: int
    application: Application
    added: Tuple[Fact, ...]
    fresh: Tuple[ElementId, ...]


@dataclass(frozen=True)
class ChaseTrace:
    steps: Tuple[TraceStep, ...] = ()
    schedule: str = SCHEDULE

    def __len__(self) -> int:
        return len(self.steps)

    def to_model(self, axioms: Sequence[CanonicalAxiom]) -> ChaseTraceModel:
        steps = []
        for step in self.steps:
            app = step.application
            axiom = axioms[app.axiom]
            steps.append(TraceStepModel(
                step=step.step,
                axiom=app.axiom,
                subst=[(v, e.serial) for v, e in zip(axiom.context, app.substitution)],
                disjunct=app.disjunct,
                added=[FactRefModel(rel=f.relation, args=[a.serial for a in f.args]) for f in step.added],
                fresh=[ElementModel(id=e.serial, gen=e.gen, name=str(e)) for e in step.fresh],
            ))
        return ChaseTraceModel(schedule=self.schedule, steps=steps)

    @classmethod
    def from_model(cls, model: ChaseTraceModel, start: Diagram) -> "ChaseTrace":
        known: Dict[int, ElementId] = {e.serial: e for e in start.domain}

        def lookup(serial: int) -> ElementId:
            if serial not in known:
                raise ChaseError(f"trace refers to unknown element {serial}")
            return known[serial]

        steps = []
        for item in model.steps:
            substitution = tuple(lookup(s) for _, s in item.subst)
            fresh = tuple(ElementId(e.id, e.gen) for e in item.fresh)
            known.update((e.serial, e) for e in fresh)
            added = tuple(Fact(f.rel, tuple(lookup(a) for a in f.args)) for f in item.added)
            steps.append(TraceStep(item.step, Application(item.axiom, substitution, item.disjunct), added, fresh))
        return cls(tuple(steps), model.schedule)


class ChaseResult(NamedTuple):
    input: Diagram
    diagram: Diagram
    trace: ChaseTrace
    status: ChaseStatus
    axioms: Tuple[CanonicalAxiom, ...]


def chase_regular(t: Axioms, d: Diagram, fuel: int = 10_000) -> ChaseResult:
    """Fair restricted chase; each processed non-redundant application costs one unit of fuel"""
    if fuel <= 0:
        raise ChaseError("fuel must be positive")
    axioms = regular_axioms(t)
    builder = d.builder()
    queue: Deque[Application] = deque()
    seen: Set[Application] = set()
    steps: List[TraceStep] = []
    status = ChaseStatus.SATURATED
    while True:
        if not queue:
            batch = [app for app in applications(axioms, builder) if app not in seen]
            if not batch:
                break
            seen.update(batch)
            queue.extend(batch)
        app = _normalized(queue.popleft(), builder)
        if is_redundant(app, axioms, builder):
            continue
        if len(steps) == fuel:
            status = ChaseStatus.FUEL_EXHAUSTED
            break
        added, fresh = apply(builder, axioms, app)
        steps.append(TraceStep(len(steps) + 1, app, added, fresh))
        logger.debug(f"Chase step {len(steps)}: axiom {app.axiom} at {[str(e) for e in app.substitution]}")
    result = builder.freeze()
    logger.debug(f"Chase {status.value} after {len(steps)} steps with {len(result)} elements")
    return ChaseResult(d, result, ChaseTrace(tuple(steps)), status, axioms)


def replay(trace: ChaseTrace, d: Diagram, t: Axioms) -> Diagram:
    """Re-run a recorded chase from its input; fails on the first divergence"""
    axioms = regular_axioms(t)
    builder = d.builder()
    for step in trace.steps:
        app = _normalized(step.application, builder)
        if app.axiom >= len(axioms):
            raise ChaseError(f"step {step.step} names unknown axiom {app.axiom}")
        axiom = axioms[app.axiom]
        if not any(True for _ in match_atoms(builder, axiom.body, app.binding(axiom), ())):
            raise ChaseError(f"step {step.step} does not match its antecedent")
        added, fresh = apply(builder, axioms, app)
        if added != step.added or fresh != step.fresh:
            raise ChaseError(f"replay diverges at step {step.step}")
    return builder.freeze()


def is_model(t: Axioms, d: Union[Diagram, DiagramBuilder], budget: Optional[int] = None) -> bool:
    """Every application is redundant; budget caps the number of applications examined"""
    axioms = as_axioms(t)
    apps = applications(axioms, d)
    if budget is not None and len(apps) > budget:
        raise BoundExceededError(f"{len(apps)} applications exceed the budget of {budget}")
    return all(is_redundant(app, axioms, d) for app in apps)


# --- conservativity -------------------------------------------------------

@dataclass(frozen=True)
class DerivationStep:
    fact: Fact
    provenance: Provenance


@dataclass(frozen=True)
class ConservativityWitness:
    """φ over the input elements with input ⊨ φ and φ entailing the fact"""
    formula: Formula
    context: Tuple[str, ...]
    elements: Tuple[ElementId, ...]
    goal: Formula
    premises: Tuple[Fact, ...]
    derivation: Tuple[DerivationStep, ...]

    def assignment(self) -> Dict[str, ElementId]:
        return dict(zip(self.context, self.elements))


def _as_formula(fact: Fact, names: Dict[ElementId, str]) -> Formula:
    if fact.relation == EQUALITY:
        return Eq(names[fact.args[0]], names[fact.args[1]])
    return Atom(fact.relation, tuple(names[a] for a in fact.args))


def conservativity_witness(result: ChaseResult, fact: Fact) -> ConservativityWitness:
    source, output = result.input, result.diagram
    if fact not in output:
        raise WitnessError(f"{fact} is not in the chase output")
    if any(a not in source for a in fact.args):
        raise WitnessError(f"{fact} mentions elements created by the chase")

    premises: List[Fact] = []
    steps: List[DerivationStep] = []
    visited: Set[Fact] = set()
    stack: List[Tuple[Fact, bool]] = [(fact, False)]
    while stack:
        current, expanded = stack.pop()
        if expanded:
            steps.append(DerivationStep(current, output.provenance(current)))
            continue
        if current in visited:
            continue
        visited.add(current)
        if all(a in source for a in current.args) and current in source:
            if not (current.relation == EQUALITY and current.args[0] == current.args[1]):
                premises.append(current)
            continue
        provenance = output.provenance(current)
        if provenance is None or provenance.kind == ProvenanceKind.INPUT:
            raise WitnessError(f"{current} has no derivation from the input")
        stack.append((current, True))
        for parent in reversed(provenance.parents):
            stack.append((parent, False))

    elements: List[ElementId] = []
    for f in [fact] + sorted(premises):
        for a in f.args:
            if a not in elements:
                elements.append(a)
    names = {e: f"x{i}" for i, e in enumerate(elements)}
    premises = sorted(set(premises))
    formula = conj(_as_formula(p, names) for p in premises)
    goal = TRUE if fact.relation == EQUALITY and fact.args[0] == fact.args[1] else _as_formula(fact, names)
    return ConservativityWitness(formula, tuple(names[e] for e in elements), tuple(elements), goal,
                                 tuple(premises), tuple(steps))


def check_derivation(t: Axioms, premises: Sequence[Fact], steps: Sequence[DerivationStep], goal: Fact) -> bool:
    """Replay a derivation from premises through axiom instances and congruence steps"""
    axioms = as_axioms(t)
    builder = DiagramBuilder()
    for fact in list(premises) + [goal]:
        for a in fact.args:
            builder.add_element(a)
    for fact in premises:
        builder.add_fact(fact)
    for step in steps:
        provenance = step.provenance
        for parent in provenance.parents:
            for a in parent.args:
                builder.add_element(a)
            if not builder.holds(parent.relation, parent.args):
                logger.debug(f"Derivation parent {parent} of {step.fact} does not hold")
                return False
        if provenance.kind == ProvenanceKind.CLOSURE:
            if not builder.holds(step.fact.relation, step.fact.args):
                return False
            continue
        if provenance.kind != ProvenanceKind.AXIOM or provenance.axiom is None or provenance.axiom >= len(axioms):
            return False
        axiom = axioms[provenance.axiom]
        binding = dict(provenance.substitution)
        for e in binding.values():
            builder.add_element(e)
        if provenance.disjunct >= len(axiom.heads):
            return False
        try:
            body = [instantiate(atom, binding) for atom in axiom.body]
            produced = [instantiate(atom, binding) for atom in axiom.heads[provenance.disjunct].atoms]
        except EngineError:
            return False
        if not all(builder.holds(f.relation, f.args) for f in body):
            return False
        for f in produced:
            builder.add_fact(f, provenance)
        if not builder.holds(step.fact.relation, step.fact.args):
            return False
    return builder.holds(goal.relation, goal.args)


# --- weak reflection ------------------------------------------------------

def weak_reflection_lift(result: ChaseResult, h: Homomorphism, m: Diagram, budget: int = 10_000) -> Homomorphism:
    """Extend h along the chase trace into the model m, picking least witnesses"""
    if result.status != ChaseStatus.SATURATED:
        raise LiftError("the chase did not saturate")
    if not check_homomorphism(h, result.input, m):
        raise LiftError("h is not a homomorphism into m")
    if not is_model(result.axioms, m, budget):
        raise LiftError("target diagram fails an axiom")
    images: Dict[ElementId, Set[ElementId]] = {e: set(h.image(e)) for e in result.input.domain}
    for step in result.trace.steps:
        app = step.application
        axiom = result.axioms[app.axiom]
        head = axiom.heads[app.disjunct]
        combos = list(product(*(sorted(images[e]) for e in app.substitution)))
        chosen: Optional[Tuple[ElementId, ...]] = None
        for witness in product(m.representatives(), repeat=len(head.variables)):
            if all(_head_holds(m, axiom, head.variables, head.atoms, combo, witness) for combo in combos):
                chosen = witness
                break
        if chosen is None:
            raise WitnessError(f"no witness in the target for step {step.step}")
        for e, w in zip(step.fresh, chosen):
            images[e] = set(m.class_of(w))
    for e in result.diagram.domain:
        if e not in images:
            raise LiftError(f"element {e} has no image")
    closed = {
        e: {y for b in targets for y in m.class_of(b)}
        for e, targets in images.items()
    }
    lifted = Homomorphism(frozenset((e, b) for e, targets in closed.items() for b in targets))
    if not check_homomorphism(lifted, result.diagram, m):
        raise LiftError("lifted relation is not a homomorphism")
    if inclusion_hom(result.input, result.diagram).then(lifted) != h:
        raise LiftError("lift does not extend h")
    return lifted


def _head_holds(m: Diagram, axiom: CanonicalAxiom, variables: Sequence[str], atoms: Sequence[Formula],
                combo: Sequence[ElementId], witness: Sequence[ElementId]) -> bool:
    binding = dict(zip(axiom.context, combo))
    binding.update(zip(variables, witness))
    for atom in atoms:
        fact = instantiate(atom, binding)
        if not m.holds(fact.relation, fact.args):
            return False
    return True
