import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Deque, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from chase import chase_regular, regular_axioms
from diagram import Diagram, ElementId, Fact, Provenance, ProvenanceKind, instantiate, is_subdiagram, satisfies
from errors import DiagramError, StructureError, UnboundVariableError
from models import ChaseStatus, ForcingKind, Verdict
from morley import MorleyTheory
from syntax import (
    And,
    Atom,
    Bottom,
    CanonicalAxiom,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Or,
    Top,
    canonical_context,
    format_formula,
)

logger = logging.getLogger(__name__)

FORCED, NOT_FORCED, UNKNOWN = Verdict.FORCED, Verdict.NOT_FORCED, Verdict.UNKNOWN


# --- three-valued connectives ---------------------------------------------

def _all(verdicts: Iterable[Verdict]) -> Verdict:
    result = FORCED
    for v in verdicts:
        if v is NOT_FORCED:
            return NOT_FORCED
        if v is UNKNOWN:
            result = UNKNOWN
    return result


def _any(verdicts: Iterable[Verdict]) -> Verdict:
    result = NOT_FORCED
    for v in verdicts:
        if v is FORCED:
            return FORCED
        if v is UNKNOWN:
            result = UNKNOWN
    return result


def _negate(v: Verdict) -> Verdict:
    if v is UNKNOWN:
        return UNKNOWN
    return NOT_FORCED if v is FORCED else FORCED


# --- structures -----------------------------------------------------------

@dataclass
class ForcingNode:
    id: int
    diagram: Diagram
    depth: int = 0
    parent: Optional[int] = None
    children: List[int] = field(default_factory=list)
    chased: Optional[Fact] = None
    horizon: bool = False


class ForcingStructure:
    """Finite poset of diagrams with a forcing relation; horizon nodes have unexplored extensions"""

    def __init__(self, kind: ForcingKind, nodes: Sequence[ForcingNode], falsum: Optional[str] = None,
                 above: Optional[Dict[int, Tuple[int, ...]]] = None, morley: Optional[MorleyTheory] = None,
                 depth: Optional[int] = None, pair_fuel: Optional[int] = None,
                 schedule: Sequence[Optional[Fact]] = ()):
        self.kind = kind
        self.nodes = list(nodes)
        self.falsum = falsum
        self.morley = morley
        self.depth = depth
        self.pair_fuel = pair_fuel
        self.schedule = tuple(schedule)
        self._above = above if above is not None else self._descendants()
        self._memo: Dict[Tuple[int, Formula, Tuple[ElementId, ...]], Verdict] = {}

    def _descendants(self) -> Dict[int, Tuple[int, ...]]:
        above: Dict[int, Tuple[int, ...]] = {}
        for node in reversed(self.nodes):
            reach = [node.id]
            for child in node.children:
                reach.extend(above[child])
            above[node.id] = tuple(reach)
        return above

    def up(self, node_id: int) -> Tuple[int, ...]:
        """Nodes above node_id, itself included"""
        return self._above[node_id]

    def _strict(self) -> Set[Tuple[int, int]]:
        return {(i, j) for i, ups in self._above.items() for j in ups if i not in self._above[j]}

    @property
    def roots(self) -> List[int]:
        covered = {j for _, j in self._strict()}
        return [node.id for node in self.nodes if node.id not in covered]

    def edges(self) -> List[Tuple[int, int]]:
        """Tree edges, or the Hasse diagram of the inclusion order"""
        if any(node.children for node in self.nodes):
            return [(node.id, child) for node in self.nodes for child in node.children]
        less = self._strict()
        return sorted((i, j) for i, j in less
                      if not any((i, k) in less and (k, j) in less for k in self._above))

    def force(self, node_id: int, f: Formula, assignment: Optional[Dict[str, ElementId]] = None) -> Verdict:
        assignment = assignment or {}
        d = self.nodes[node_id].diagram
        missing = [v for v in canonical_context(f) if v not in assignment]
        if missing:
            raise UnboundVariableError(f"variables {missing} of {format_formula(f)} are unassigned")
        for e in assignment.values():
            if e not in d:
                raise DiagramError(f"element {e} is not in node {node_id}")
        return self._force(node_id, f, assignment)

    def _force(self, node_id: int, f: Formula, assignment: Dict[str, ElementId]) -> Verdict:
        d = self.nodes[node_id].diagram
        key = (node_id, f, tuple(d.rep(assignment[v]) for v in canonical_context(f)))
        if key not in self._memo:
            self._memo[key] = self._evaluate(node_id, f, assignment)
        return self._memo[key]

    def _evaluate(self, node_id: int, f: Formula, a: Dict[str, ElementId]) -> Verdict:
        node = self.nodes[node_id]
        if isinstance(f, Top):
            return FORCED
        if isinstance(f, (Bottom, Atom, Eq)):
            local = self._local(node.diagram, f, a)
            return self._covered(node, f, a, local) if self.kind == ForcingKind.GENERALIZED_BETH else local
        if isinstance(f, And):
            return _all(self._force(node_id, part, a) for part in (f.left, f.right))
        if isinstance(f, Or):
            local = _any(self._force(node_id, part, a) for part in (f.left, f.right))
            return local if self.kind == ForcingKind.KRIPKE else self._covered(node, f, a, local)
        if isinstance(f, Exists):
            local = _any(self._force(node_id, f.body, {**a, f.var: e}) for e in node.diagram.representatives())
            return self._covered(node, f, a, local) if self.kind == ForcingKind.GENERALIZED_BETH else local
        if isinstance(f, Implies):
            return self._universal(
                node_id,
                lambda n: [_any((_negate(self._force(n, f.left, a)), self._force(n, f.right, a)))],
                lambda n: self._force(n, f.right, a) is FORCED,
            )
        if isinstance(f, Forall):
            return self._universal(
                node_id,
                lambda n: [self._force(n, f.body, {**a, f.var: e}) for e in self.nodes[n].diagram.representatives()],
                lambda n: False,
            )
        raise TypeError(f"not a formula: {f!r}")

    def _local(self, d: Diagram, f: Formula, a: Dict[str, ElementId]) -> Verdict:
        if d.is_exploding(self.falsum):
            return FORCED
        return FORCED if satisfies(d, f, a, self.falsum) else NOT_FORCED

    def _covered(self, node: ForcingNode, f: Formula, a: Dict[str, ElementId], local: Verdict) -> Verdict:
        """Local verdict, or every child forces f; a horizon leaf cannot refute"""
        if local is FORCED:
            return FORCED
        if not node.children:
            return UNKNOWN if node.horizon else local
        return _any((local, _all(self._force(child, f, a) for child in node.children)))

    def _universal(self, node_id: int, instances: Callable[[int], List[Verdict]],
                   settled: Callable[[int], bool]) -> Verdict:
        """Quantify over the up-set; unexplored extensions of horizon nodes leave the verdict open"""
        verdicts = [v for n in self.up(node_id) for v in instances(n)]
        if NOT_FORCED in verdicts:
            return NOT_FORCED
        if UNKNOWN in verdicts:
            return UNKNOWN
        for n in self.up(node_id):
            if self.nodes[n].horizon and not settled(n):
                return UNKNOWN
        return FORCED


def force(structure: ForcingStructure, node_id: int, f: Formula,
          assignment: Optional[Dict[str, ElementId]] = None) -> Verdict:
    return structure.force(node_id, f, assignment)


# --- Beth trees -----------------------------------------------------------

def chase_pair(tm: MorleyTheory, d: Diagram, fact: Fact, fuel: int = 1000,
               axioms: Optional[Sequence[CanonicalAxiom]] = None) -> Tuple[Diagram, Diagram]:
    """Chase d extended by each disjunct of a disjunction fact"""
    if fact not in d:
        raise DiagramError(f"{fact} does not hold in the diagram")
    f = tm.map.formula(fact.relation)
    if not isinstance(f, Or):
        raise DiagramError(f"{fact} does not name a disjunction")
    axioms = regular_axioms(tm.result) if axioms is None else axioms
    binding = dict(zip(canonical_context(f), fact.args))
    out = []
    for index, side in enumerate((f.left, f.right)):
        provenance = Provenance(ProvenanceKind.AXIOM, rule="pair", disjunct=index, parents=(fact,))
        start = d.with_facts([instantiate(tm.map.atom(side), binding)], provenance)
        result = chase_regular(axioms, start, fuel)
        if result.status == ChaseStatus.FUEL_EXHAUSTED:
            logger.warning(f"Chase of disjunct {index} of {fact} ran out of fuel after {fuel} steps")
        out.append(result.diagram)
    return out[0], out[1]


def build_beth_tree(tm: MorleyTheory, root: Diagram, depth: int = 6, fuel: int = 1000) -> ForcingStructure:
    """Binary tree whose level n chases the n-th disjunction fact of a rotating enumeration"""
    axioms = regular_axioms(tm.result)
    order = {tm.map.predicate(f): i for i, f in enumerate(tm.map.closure) if isinstance(f, Or)}
    rotation: Deque[Fact] = deque()
    known: Set[Fact] = set()

    def discover(diagrams: Iterable[Diagram]) -> None:
        found = {Fact(rel, t) for d in diagrams for rel in order for t in d.tuples(rel)}
        new = sorted(found - known, key=lambda fact: (order[fact.relation], fact.args))
        known.update(new)
        rotation.extend(new)

    nodes = [ForcingNode(0, root)]
    level = [0]
    schedule: List[Optional[Fact]] = []
    discover([root])
    for n in range(depth):
        g: Optional[Fact] = None
        if rotation:
            g = rotation.popleft()
            rotation.append(g)
        schedule.append(g)
        next_level: List[int] = []
        for node_id in level:
            node = nodes[node_id]
            if g is not None and g in node.diagram:
                pair = chase_pair(tm, node.diagram, g, fuel, axioms)
                node.chased = g
            else:
                pair = (node.diagram, node.diagram)
            for d in pair:
                child = ForcingNode(len(nodes), d, n + 1, node_id)
                nodes.append(child)
                node.children.append(child.id)
                next_level.append(child.id)
        discover(nodes[i].diagram for i in next_level)
        logger.debug(f"Beth level {n + 1}: {len(next_level)} nodes, chased {g}")
        level = next_level
    for node_id in level:
        nodes[node_id].horizon = True
    return ForcingStructure(ForcingKind.BETH_STAR, nodes, tm.falsum, morley=tm, depth=depth,
                            pair_fuel=fuel, schedule=schedule)


def poset_of_inclusions(diagrams: Sequence[Diagram], falsum: Optional[str] = None) -> ForcingStructure:
    nodes = [ForcingNode(i, d) for i, d in enumerate(diagrams)]
    above = {
        i: tuple(j for j, other in enumerate(diagrams) if is_subdiagram(d, other))
        for i, d in enumerate(diagrams)
    }
    return ForcingStructure(ForcingKind.KRIPKE, nodes, falsum, above=above)


def with_kind(structure: ForcingStructure, kind: ForcingKind) -> ForcingStructure:
    """Same poset and trees read under another forcing relation"""
    return ForcingStructure(kind, structure.nodes, structure.falsum, dict(structure._above), structure.morley,
                            structure.depth, structure.pair_fuel, structure.schedule)


def check_tree_axioms(structure: ForcingStructure) -> List[str]:
    """Violations of the tree conditions on the explored fragment; empty when all hold"""
    problems: List[str] = []
    nodes = structure.nodes
    for node in nodes:
        if node.children and len(node.children) != 2 and structure.kind != ForcingKind.KRIPKE:
            problems.append(f"node {node.id} has {len(node.children)} children")
        for child_id in node.children:
            child = nodes[child_id]
            if child.parent != node.id or child.depth != node.depth + 1:
                problems.append(f"node {child_id} is not a well-placed child of {node.id}")
            if not set(structure.up(child_id)) <= set(structure.up(node.id)):
                problems.append(f"up-set of {child_id} is not contained in that of {node.id}")
        for other in structure.up(node.id):
            if not is_subdiagram(node.diagram, nodes[other].diagram):
                problems.append(f"node {other} does not extend node {node.id}")
    if len(structure.roots) != 1 and structure.kind != ForcingKind.KRIPKE:
        problems.append(f"{len(structure.roots)} roots")
    return problems


# --- truth versus forcing -------------------------------------------------

@dataclass(frozen=True)
class Mismatch:
    node: int
    formula: str
    elements: Tuple[ElementId, ...]
    verdict: Verdict
    holds: bool


@dataclass
class EquivalenceReport:
    checked: int = 0
    skipped: int = 0
    unsound: List[Mismatch] = field(default_factory=list)
    incomplete: List[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unsound and not self.incomplete


def check_forcing_truth_equivalence(structure: ForcingStructure, formulas: Sequence[Formula],
                                    horizon: int = 3) -> EquivalenceReport:
    """Compare forcing of φ with truth of its predicate at every node up to the horizon depth"""
    tm = structure.morley
    if tm is None:
        raise StructureError("structure was not built from a Morleyized theory")
    for f in formulas:
        if f not in tm.map:
            raise StructureError(f"{format_formula(f)} has no predicate; pass it as an extra when Morleyizing")
    report = EquivalenceReport()
    for node in structure.nodes:
        if node.depth > horizon:
            continue
        d = node.diagram
        for f in formulas:
            context = canonical_context(f)
            name = tm.map.predicate(f)
            for combo in product(d.representatives(), repeat=len(context)):
                verdict = structure.force(node.id, f, dict(zip(context, combo)))
                if verdict is UNKNOWN:
                    report.skipped += 1
                    continue
                holds = d.holds(name, combo)
                if verdict is NOT_FORCED and holds:
                    report.unsound.append(Mismatch(node.id, format_formula(f), combo, verdict, holds))
                elif verdict is FORCED and not holds:
                    report.incomplete.append(Mismatch(node.id, format_formula(f), combo, verdict, holds))
                else:
                    report.checked += 1
    if report.skipped:
        logger.warning(f"Skipped {report.skipped} cases that depend on unexplored nodes")
    logger.info(f"Compared {report.checked} cases: {len(report.unsound)} unsound, "
                f"{len(report.incomplete)} incomplete")
    return report


def to_dot(structure: ForcingStructure, verdicts: Optional[Dict[int, Verdict]] = None) -> str:
    lines = ["digraph forcing {", "  node [shape=box];"]
    for node in structure.nodes:
        label = f"n{node.id}"
        if verdicts and node.id in verdicts:
            label += f" {verdicts[node.id].value}"
        if node.chased is not None:
            label += f"\\nsplit {node.chased}"
        style = ", style=dashed" if node.horizon else ""
        lines.append(f'  n{node.id} [label="{label}"{style}];')
    for parent, child in structure.edges():
        lines.append(f"  n{parent} -> n{child};")
    lines.append("}")
    return "\n".join(lines) + "\n"
