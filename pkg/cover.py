import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Sequence, Set, Tuple

from chase import Application, Axioms, applications, as_axioms, is_redundant
from diagram import (
    Diagram,
    DiagramBuilder,
    ElementId,
    Provenance,
    ProvenanceKind,
    Fact,
    extend,
    instantiate,
    match_atoms,
    satisfies,
)
from errors import DiagramError, EngineError, FragmentError
from models import BarEntryModel, CertificateModel, CertificateNodeModel, ProofStatus
from syntax import (
    CanonicalAxiom,
    Eq,
    Formula,
    Fragment,
    Head,
    Sequent,
    canonical_parts,
    conj,
    conjuncts,
    format_formula,
    fragment_of,
    is_horn,
)

logger = logging.getLogger(__name__)


def present(f: Formula, context: Sequence[str]) -> Diagram:
    """The finite diagram presented by a Horn formula-in-context, one element per variable"""
    if not is_horn(f):
        raise FragmentError(f"{format_formula(f)} is not Horn")
    builder = DiagramBuilder()
    binding = {v: builder.fresh(0, v) for v in context}
    for atom in conjuncts(f):
        builder.add_fact(instantiate(atom, binding))
    return builder.freeze()


@dataclass(frozen=True)
class BarEntry:
    leaf: int
    disjunct: int
    witness: Tuple[ElementId, ...] = ()
    axiom: Optional[int] = None
    substitution: Tuple[ElementId, ...] = ()


@dataclass
class CoverNode:
    id: int
    diagram: Diagram
    depth: int
    parent: Optional[int] = None
    application: Optional[Application] = None
    children: List[int] = field(default_factory=list)
    bar: Optional[BarEntry] = None
    pending: Deque[Application] = field(default_factory=deque, repr=False)
    seen: Set[Application] = field(default_factory=set, repr=False)


@dataclass
class CoverTree:
    root: Diagram
    base: Tuple[ElementId, ...]
    nodes: List[CoverNode]

    def branch(self, node_id: int) -> List[int]:
        path = []
        current: Optional[int] = node_id
        while current is not None:
            path.append(current)
            current = self.nodes[current].parent
        return path[::-1]

    def leaves(self) -> List[CoverNode]:
        return [node for node in self.nodes if not node.children]


@dataclass(frozen=True)
class CertificateNode:
    id: int
    parent: Optional[int] = None
    axiom: Optional[int] = None
    substitution: Tuple[ElementId, ...] = ()
    disjunct: Optional[int] = None


@dataclass(frozen=True)
class ProofCertificate:
    sequent: Sequent
    root: Diagram
    nodes: Tuple[CertificateNode, ...]
    bar: Tuple[BarEntry, ...]

    def to_model(self) -> CertificateModel:
        return CertificateModel(
            sequent=str(self.sequent),
            root=self.root.to_model(),
            nodes=[CertificateNodeModel(id=n.id, parent=n.parent, axiom=n.axiom,
                                        subst=[e.serial for e in n.substitution], disjunct=n.disjunct)
                   for n in self.nodes],
            bar=[BarEntryModel(leaf=b.leaf, disjunct=b.disjunct, witness=[e.serial for e in b.witness],
                               axiom=b.axiom, subst=[e.serial for e in b.substitution])
                 for b in self.bar],
        )


def certificate_from_model(model: CertificateModel, sequent: Sequent) -> ProofCertificate:
    """Rebuild a certificate; element ids stay serials until replay resolves them"""
    root = Diagram.from_model(model.root)
    nodes = tuple(
        CertificateNode(n.id, n.parent, n.axiom, tuple(ElementId(s) for s in n.subst), n.disjunct)
        for n in model.nodes
    )
    bar = tuple(
        BarEntry(b.leaf, b.disjunct, tuple(ElementId(s) for s in b.witness), b.axiom,
                 tuple(ElementId(s) for s in b.subst))
        for b in model.bar
    )
    return ProofCertificate(sequent, root, nodes, bar)


@dataclass
class SearchVerdict:
    status: ProofStatus
    depth: int
    certificate: Optional[ProofCertificate] = None
    open_branch: Tuple[int, ...] = ()
    open_diagram: Optional[Diagram] = None
    saturated: bool = False
    tree: Optional[CoverTree] = None

    @property
    def proved(self) -> bool:
        return self.status == ProofStatus.PROVED


def goal_witness(d: Diagram, goal: CanonicalAxiom, base: Sequence[ElementId]) -> Optional[Tuple[int, Tuple[ElementId, ...]]]:
    """First goal disjunct with a witness tuple at the node, if any"""
    binding = dict(zip(goal.context, base))
    for index, head in enumerate(goal.heads):
        for match in match_atoms(d, head.atoms, binding, head.variables):
            return index, tuple(match[v] for v in head.variables)
    return None


def bar_member(d: Diagram, goal: CanonicalAxiom, base: Sequence[ElementId]) -> bool:
    return goal_witness(d, goal, base) is not None


def _next_application(node: CoverNode, axioms: Sequence[CanonicalAxiom]) -> Optional[Application]:
    while True:
        while node.pending:
            candidate = node.pending.popleft()
            app = Application(candidate.axiom, tuple(node.diagram.rep(e) for e in candidate.substitution))
            if not is_redundant(app, axioms, node.diagram):
                return app
        batch = [app for app in applications(axioms, node.diagram) if app not in node.seen]
        if not batch:
            return None
        node.seen.update(batch)
        node.pending.extend(batch)


def _children(axioms: Sequence[CanonicalAxiom], tree: CoverTree, node: CoverNode,
              app: Application) -> List[CoverNode]:
    axiom = axioms[app.axiom]
    children = []
    for index, head in enumerate(axiom.heads):
        provenance = Provenance(ProvenanceKind.AXIOM, rule="cover", axiom=app.axiom, disjunct=index,
                                substitution=tuple(zip(axiom.context, app.substitution)))
        diagram, _ = extend(node.diagram, conj(head.atoms), axiom.context + head.variables,
                            app.substitution, len(head.variables), provenance=provenance)
        child = CoverNode(
            id=len(tree.nodes),
            diagram=diagram,
            depth=node.depth + 1,
            parent=node.id,
            application=Application(app.axiom, app.substitution, index),
            pending=deque(node.pending),
            seen=set(node.seen),
        )
        tree.nodes.append(child)
        node.children.append(child.id)
        children.append(child)
    return children


def expand_node(axioms: Sequence[CanonicalAxiom], tree: CoverTree, node: CoverNode) -> List[CoverNode]:
    """Children of the least unprocessed non-redundant application, or the node itself"""
    app = _next_application(node, axioms)
    if app is None:
        return [node]
    if not axioms[app.axiom].heads:
        node.bar = BarEntry(node.id, -1, (), app.axiom, app.substitution)
        return [node]
    return _children(axioms, tree, node, app)


def _certificate(tree: CoverTree, goal: CanonicalAxiom) -> ProofCertificate:
    nodes = tuple(
        CertificateNode(n.id, n.parent, n.application.axiom if n.application else None,
                        n.application.substitution if n.application else (),
                        n.application.disjunct if n.application else None)
        for n in tree.nodes
    )
    bar = tuple(n.bar for n in tree.nodes if n.bar is not None)
    return ProofCertificate(goal.to_sequent(), tree.root, nodes, bar)


def single_part(s: Sequent, limit: int = 10_000) -> CanonicalAxiom:
    fragment = fragment_of(s.antecedent, s.consequent)
    if not fragment.within(Fragment.COHERENT):
        raise FragmentError(f"sequent {s} is not coherent")
    parts = canonical_parts(s, limit)
    if len(parts) != 1:
        raise FragmentError(f"sequent {s} splits into {len(parts)} canonical sequents; prove each separately")
    return parts[0]


def prove(t: Axioms, s: Sequent, max_depth: int = 12, limit: int = 10_000) -> SearchVerdict:
    """Breadth-first dynamical-cover search for a bar; Unknown when the depth runs out"""
    axioms = as_axioms(t)
    goal = single_part(s, limit)
    root = present(conj(goal.body), goal.context)
    base = root.domain
    tree = CoverTree(root, base, [CoverNode(0, root, 0)])
    frontier = [tree.nodes[0]]
    depth = 0
    while True:
        scheduled: List[Tuple[CoverNode, Application]] = []
        for node in frontier:
            found = goal_witness(node.diagram, goal, base)
            if found is not None:
                node.bar = BarEntry(node.id, found[0], found[1])
                continue
            app = _next_application(node, axioms)
            if app is None:
                logger.info(f"Open node {node.id} is saturated at depth {depth}")
                return SearchVerdict(ProofStatus.UNKNOWN, depth, None, tuple(tree.branch(node.id)),
                                     node.diagram, True, tree)
            if not axioms[app.axiom].heads:
                node.bar = BarEntry(node.id, -1, (), app.axiom, app.substitution)
                continue
            scheduled.append((node, app))
        if not scheduled:
            logger.info(f"Proved {s} at depth {depth} with {len(tree.leaves())} leaves")
            return SearchVerdict(ProofStatus.PROVED, depth, _certificate(tree, goal), (), None, False, tree)
        if depth == max_depth:
            node = scheduled[0][0]
            logger.info(f"No bar for {s} within depth {max_depth}")
            return SearchVerdict(ProofStatus.UNKNOWN, depth, None, tuple(tree.branch(node.id)),
                                 node.diagram, False, tree)
        frontier = [child for node, app in scheduled for child in _children(axioms, tree, node, app)]
        depth += 1
        logger.debug(f"Cover level {depth}: {len(frontier)} nodes")


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    failure: Optional[str] = None
    node: Optional[int] = None


def replay_head(parent: Diagram, head: Head, context: Sequence[str], olds: Sequence[ElementId]) -> Diagram:
    """The parent with one fresh element per head variable and the head atoms asserted"""
    builder = DiagramBuilder(parent)
    generation = parent.generation + 1
    fresh = tuple(builder.add_element(ElementId(parent.next_serial + i, generation))
                  for i in range(len(head.variables)))
    binding = dict(zip(tuple(context) + head.variables, tuple(olds) + fresh))
    for atom in head.atoms:
        if isinstance(atom, Eq):
            builder.add_equality(binding[atom.left], binding[atom.right])
        else:
            builder.add_fact(Fact(atom.relation, tuple(binding[a] for a in atom.args)))
    return builder.freeze()


def check_certificate(t: Axioms, s: Sequent, certificate: ProofCertificate, limit: int = 10_000) -> CheckResult:
    """Replay presentation, applications and bar witnesses independently of the search"""
    try:
        axioms = as_axioms(t)
        goal = single_part(s, limit)
    except EngineError as e:
        return CheckResult(False, str(e))
    root = present(conj(goal.body), goal.context)
    if root != certificate.root:
        return CheckResult(False, "root diagram does not match the presented antecedent", 0)
    base = root.domain
    diagrams: Dict[int, Diagram] = {}
    families: Dict[int, List[CertificateNode]] = {}
    for node in certificate.nodes:
        if node.parent is None:
            if node.id in diagrams or diagrams:
                return CheckResult(False, "certificate has more than one root", node.id)
            diagrams[node.id] = root
            continue
        if node.parent not in diagrams:
            return CheckResult(False, "node precedes its parent", node.id)
        if node.axiom is None or node.axiom >= len(axioms) or node.disjunct is None:
            return CheckResult(False, "node names no application", node.id)
        parent = diagrams[node.parent]
        axiom = axioms[node.axiom]
        if not 0 <= node.disjunct < len(axiom.heads) or len(node.substitution) != len(axiom.context):
            return CheckResult(False, "application does not fit its axiom", node.id)
        try:
            olds = tuple(parent.element(e.serial) for e in node.substitution)
        except DiagramError as e:
            return CheckResult(False, str(e), node.id)
        if not satisfies(parent, conj(axiom.body), dict(zip(axiom.context, olds))):
            return CheckResult(False, "replay mismatch: antecedent does not hold at the parent", node.id)
        head: Head = axiom.heads[node.disjunct]
        diagrams[node.id] = replay_head(parent, head, axiom.context, olds)
        families.setdefault(node.parent, []).append(node)

    if not diagrams:
        return CheckResult(False, "certificate has no root")
    for parent, children in families.items():
        first = children[0]
        if any((c.axiom, c.substitution) != (first.axiom, first.substitution) for c in children):
            return CheckResult(False, "children of one node come from different applications", parent)
        if sorted(c.disjunct for c in children) != list(range(len(axioms[first.axiom].heads))):
            return CheckResult(False, "children do not cover every disjunct", parent)

    leaves = [n for n in diagrams if n not in families]
    entries = {entry.leaf: entry for entry in certificate.bar}
    if len(entries) != len(certificate.bar):
        return CheckResult(False, "a leaf has two bar entries")
    for leaf in leaves:
        entry = entries.get(leaf)
        if entry is None:
            return CheckResult(False, "leaf is not in the bar", leaf)
        d = diagrams[leaf]
        if entry.disjunct == -1:
            if entry.axiom is None or entry.axiom >= len(axioms) or axioms[entry.axiom].heads:
                return CheckResult(False, "closing axiom is not a falsum axiom", leaf)
            axiom = axioms[entry.axiom]
            try:
                olds = tuple(d.element(e.serial) for e in entry.substitution)
            except DiagramError as e:
                return CheckResult(False, str(e), leaf)
            if len(olds) != len(axiom.context) or not satisfies(d, conj(axiom.body), dict(zip(axiom.context, olds))):
                return CheckResult(False, "falsum axiom does not apply at the leaf", leaf)
            continue
        if not 0 <= entry.disjunct < len(goal.heads):
            return CheckResult(False, "bar entry names no goal disjunct", leaf)
        head = goal.heads[entry.disjunct]
        if len(entry.witness) != len(head.variables):
            return CheckResult(False, "witness has the wrong length", leaf)
        try:
            witness = tuple(d.element(e.serial) for e in entry.witness)
        except DiagramError as e:
            return CheckResult(False, str(e), leaf)
        assignment = dict(zip(goal.context, base))
        assignment.update(zip(head.variables, witness))
        if not satisfies(d, conj(head.atoms), assignment):
            return CheckResult(False, "witness does not satisfy its disjunct", leaf)
    if set(entries) - set(leaves):
        return CheckResult(False, "bar entry on an inner node", min(set(entries) - set(leaves)))
    return CheckResult(True)
