import logging
from itertools import product
from typing import List, Optional, Tuple

from chase import chase_regular, regular_axioms
from config import EngineSettings, load_settings
from cover import certificate_from_model, check_certificate, prove
from diagram import Diagram
from models import (
    ChaseRequest,
    ChaseResponse,
    CheckRequest,
    CheckResponse,
    ForceRequest,
    ForceResponse,
    ForcingKind,
    MorleyizeRequest,
    MorleyizeResponse,
    MorleyTarget,
    NodeVerdictModel,
    OracleRequest,
    OracleResponse,
    ParseRequest,
    ParseResponse,
    ProofStatus,
    ProveRequest,
    ProveResponse,
    RelationModel,
    Verdict,
)
from morley import morleyize
from oracle import EnumerationBound, search
from semantics import ForcingStructure, build_beth_tree, to_dot, with_kind
from syntax import (
    CanonicalAxiom,
    Formula,
    Theory,
    canonical_axioms,
    canonical_parts,
    format_sequent,
    parse_formula,
    parse_sequent,
    parse_theory,
    pretty_theory,
)

logger = logging.getLogger(__name__)


class ReasoningEngine:
    """Single entry point over parsing, Morleyization, chase, proof search, forcing and the oracle"""

    def __init__(self, settings: Optional[EngineSettings] = None):
        self.settings = settings or load_settings()

    def _axioms(self, theory: Theory) -> Tuple[CanonicalAxiom, ...]:
        return canonical_axioms(theory, self.settings.normalize_limit)

    def parse(self, request: ParseRequest) -> ParseResponse:
        theory = parse_theory(request.theory)
        logger.info(f"Parsed theory {theory.name or '<anonymous>'}: {len(theory.axioms)} axioms, "
                    f"fragment {theory.fragment.value}")
        return ParseResponse(
            name=theory.name,
            relations=[RelationModel(name=n, arity=a) for n, a in theory.signature.relations],
            axioms=[format_sequent(s) for s in theory.axioms],
            fragment=theory.fragment.value,
            habitative=theory.habitative,
            pretty=pretty_theory(theory),
        )

    def morleyize(self, request: MorleyizeRequest) -> MorleyizeResponse:
        theory = parse_theory(request.theory)
        extras = [parse_formula(text, theory.signature)[0] for text in request.extras]
        tm = morleyize(theory, extras, request.target)
        logger.info(f"Morleyized into {len(tm.result.axioms)} {request.target.value} axioms "
                    f"over {len(tm.map.closure)} formulas")
        return MorleyizeResponse(
            theory=pretty_theory(tm.result),
            aliases=tm.map.aliases(),
            tags=list(tm.tags),
            axiom_count=len(tm.result.axioms),
        )

    def chase(self, request: ChaseRequest) -> ChaseResponse:
        theory = parse_theory(request.theory)
        start = Diagram.from_model(request.diagram) if request.diagram is not None else Diagram.empty()
        axioms = regular_axioms(self._axioms(theory))
        result = chase_regular(axioms, start, request.fuel or self.settings.chase_fuel)
        logger.info(f"Chase {result.status.value} after {len(result.trace)} steps, "
                    f"{len(result.diagram)} elements")
        return ChaseResponse(status=result.status, diagram=result.diagram.to_model(),
                             trace=result.trace.to_model(axioms))

    def prove(self, request: ProveRequest) -> ProveResponse:
        theory = parse_theory(request.theory)
        sequent = parse_sequent(request.sequent, theory.signature)
        axioms = self._axioms(theory)
        max_depth = self.settings.max_depth if request.max_depth is None else request.max_depth
        certificates = []
        depth = 0
        for part in canonical_parts(sequent, self.settings.normalize_limit):
            verdict = prove(axioms, part.to_sequent(), max_depth, self.settings.normalize_limit)
            depth = max(depth, verdict.depth)
            if not verdict.proved:
                logger.info(f"Proof search for {request.sequent} ended Unknown at depth {verdict.depth}")
                return ProveResponse(
                    verdict=ProofStatus.UNKNOWN,
                    depth=depth,
                    open_branch=list(verdict.open_branch),
                    open_diagram=verdict.open_diagram.to_model() if verdict.open_diagram is not None else None,
                    saturated=verdict.saturated,
                )
            certificates.append(verdict.certificate.to_model())
        logger.info(f"Proved {request.sequent} with {len(certificates)} certificates, depth {depth}")
        return ProveResponse(verdict=ProofStatus.PROVED, depth=depth, certificates=certificates)

    def check(self, request: CheckRequest) -> CheckResponse:
        theory = parse_theory(request.theory)
        sequent = parse_sequent(request.sequent, theory.signature)
        axioms = self._axioms(theory)
        parts = canonical_parts(sequent, self.settings.normalize_limit)
        if len(parts) != len(request.certificates):
            return CheckResponse(ok=False, failure=f"expected {len(parts)} certificates, "
                                                   f"got {len(request.certificates)}")
        for part, model in zip(parts, request.certificates):
            goal = part.to_sequent()
            result = check_certificate(axioms, goal, certificate_from_model(model, goal),
                                       self.settings.normalize_limit)
            if not result.ok:
                logger.info(f"Certificate rejected: {result.failure}")
                return CheckResponse(ok=False, failure=result.failure, node=result.node)
        logger.info(f"Accepted {len(parts)} certificates for {request.sequent}")
        return CheckResponse(ok=True)

    def forcing_structure(self, request: ForceRequest) -> Tuple[ForcingStructure, Formula, Tuple[str, ...]]:
        theory = parse_theory(request.theory)
        query, context = parse_formula(request.query, theory.signature)
        tm = morleyize(theory, [query], MorleyTarget.REGULAR)
        if request.root is not None:
            root = Diagram.from_model(request.root)
        else:
            root = chase_regular(regular_axioms(tm.result), Diagram.empty(), self.settings.chase_fuel).diagram
        depth = self.settings.beth_depth if request.depth is None else request.depth
        structure = build_beth_tree(tm, root, depth, self.settings.pair_fuel)
        if request.kind != ForcingKind.BETH_STAR:
            structure = with_kind(structure, request.kind)
        return structure, query, context

    def force(self, request: ForceRequest) -> ForceResponse:
        structure, query, context = self.forcing_structure(request)
        root = structure.nodes[0].diagram
        tuples = list(product(root.representatives(), repeat=len(context)))
        nodes: List[NodeVerdictModel] = []
        skipped = 0
        for node in structure.nodes:
            verdicts = [structure.force(node.id, query, dict(zip(context, t))) for t in tuples]
            skipped += verdicts.count(Verdict.UNKNOWN)
            nodes.append(NodeVerdictModel(id=node.id, parent=node.parent, depth=node.depth, verdicts=verdicts))
        verdict = _overall(nodes[0].verdicts)
        logger.info(f"{request.kind.value} forcing of {request.query} at the root: {verdict.value}")
        return ForceResponse(
            verdict=verdict,
            query=request.query,
            tuples=[[e.serial for e in t] for t in tuples],
            root=nodes[0].verdicts,
            nodes=nodes,
            skipped=skipped,
        )

    def force_dot(self, request: ForceRequest) -> str:
        structure, query, context = self.forcing_structure(request)
        root = structure.nodes[0].diagram
        tuples = list(product(root.representatives(), repeat=len(context)))
        verdicts = {
            node.id: _overall([structure.force(node.id, query, dict(zip(context, t))) for t in tuples])
            for node in structure.nodes
        }
        return to_dot(structure, verdicts)

    def oracle(self, request: OracleRequest) -> OracleResponse:
        theory = parse_theory(request.theory)
        sequent = parse_sequent(request.sequent, theory.signature)
        max_size = self.settings.max_size if request.max_size is None else request.max_size
        result = search(theory, sequent, EnumerationBound(signature=theory.signature, max_size=max_size))
        return OracleResponse(
            valid=result.valid,
            max_size=max_size,
            checked=result.checked,
            countermodel=result.countermodel.to_model() if result.countermodel is not None else None,
            assignment={v: e.serial for v, e in result.assignment.items()},
        )

    @property
    def status(self) -> str:
        return "healthy"


def _overall(verdicts: List[Verdict]) -> Verdict:
    if Verdict.NOT_FORCED in verdicts:
        return Verdict.NOT_FORCED
    if Verdict.UNKNOWN in verdicts:
        return Verdict.UNKNOWN
    return Verdict.FORCED


