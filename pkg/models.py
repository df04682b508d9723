from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Tuple
from enum import Enum


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    DOT = "dot"


class MorleyTarget(str, Enum):
    REGULAR = "regular"
    COHERENT = "coherent"


class ForcingKind(str, Enum):
    KRIPKE = "kripke"
    BETH_STAR = "beth_star"
    GENERALIZED_BETH = "generalized_beth"


class ChaseStatus(str, Enum):
    SATURATED = "saturated"
    FUEL_EXHAUSTED = "fuel_exhausted"


class ProofStatus(str, Enum):
    PROVED = "proved"
    UNKNOWN = "unknown"


class Verdict(str, Enum):
    FORCED = "forced"
    NOT_FORCED = "not_forced"
    UNKNOWN = "unknown"


# --- diagrams and traces --------------------------------------------------

class ElementModel(BaseModel):
    id: int = Field(..., description="Serial number, unique within a diagram")
    gen: int = Field(0, description="Creation generation")
    name: str = ""


class FactRefModel(BaseModel):
    rel: str
    args: List[int]


class ProvenanceModel(BaseModel):
    kind: str = Field(..., description="input, axiom or closure")
    rule: Optional[str] = None
    axiom: Optional[int] = None
    disjunct: int = 0
    subst: List[Tuple[str, int]] = Field(default_factory=list)
    parents: List[FactRefModel] = Field(default_factory=list)


class FactModel(BaseModel):
    rel: str
    args: List[int]
    prov: Optional[ProvenanceModel] = None


class DiagramModel(BaseModel):
    domain: List[ElementModel] = Field(default_factory=list)
    facts: List[FactModel] = Field(default_factory=list)


class TraceStepModel(BaseModel):
    step: int
    axiom: int
    subst: List[Tuple[str, int]]
    disjunct: int = 0
    added: List[FactRefModel] = Field(default_factory=list)
    fresh: List[ElementModel] = Field(default_factory=list)


class ChaseTraceModel(BaseModel):
    schedule: str = "restricted-round-robin"
    steps: List[TraceStepModel] = Field(default_factory=list)


# --- certificates ---------------------------------------------------------

class CertificateNodeModel(BaseModel):
    id: int
    parent: Optional[int] = None
    axiom: Optional[int] = None
    subst: List[int] = Field(default_factory=list)
    disjunct: Optional[int] = None


class BarEntryModel(BaseModel):
    leaf: int
    disjunct: int = Field(..., description="Witnessed goal disjunct, -1 for a node closed by a falsum axiom")
    witness: List[int] = Field(default_factory=list)
    axiom: Optional[int] = None
    subst: List[int] = Field(default_factory=list)


class CertificateModel(BaseModel):
    sequent: str
    root: DiagramModel
    nodes: List[CertificateNodeModel]
    bar: List[BarEntryModel]


# --- requests -------------------------------------------------------------

class ParseRequest(BaseModel):
    theory: str = Field(..., description="Theory source in the DSL")


class MorleyizeRequest(BaseModel):
    theory: str
    target: MorleyTarget = MorleyTarget.REGULAR
    extras: List[str] = Field(default_factory=list, description="Additional formulas to name")


class ChaseRequest(BaseModel):
    theory: str
    diagram: Optional[DiagramModel] = Field(None, description="Initial diagram, empty when omitted")
    fuel: Optional[int] = Field(None, gt=0)


class ProveRequest(BaseModel):
    theory: str
    sequent: str
    max_depth: Optional[int] = Field(None, ge=0)


class CheckRequest(BaseModel):
    theory: str
    sequent: str
    certificates: List[CertificateModel]


class ForceRequest(BaseModel):
    theory: str
    query: str
    kind: ForcingKind = ForcingKind.BETH_STAR
    depth: Optional[int] = Field(None, ge=0)
    root: Optional[DiagramModel] = Field(None, description="Root diagram over the extended signature; chase of the empty diagram when omitted")


class OracleRequest(BaseModel):
    theory: str
    sequent: str
    max_size: Optional[int] = Field(None, ge=0, le=4)


# --- responses ------------------------------------------------------------

class RelationModel(BaseModel):
    name: str
    arity: int = Field(..., ge=0)


class ParseResponse(BaseModel):
    name: Optional[str]
    relations: List[RelationModel]
    axioms: List[str]
    fragment: str
    habitative: bool
    pretty: str


class MorleyizeResponse(BaseModel):
    theory: str = Field(..., description="Morleyized theory in the DSL")
    aliases: Dict[str, str] = Field(..., description="Predicate name to formula text")
    tags: List[str] = Field(..., description="Schema tag of each produced axiom")
    axiom_count: int


class ChaseResponse(BaseModel):
    status: ChaseStatus
    diagram: DiagramModel
    trace: ChaseTraceModel


class ProveResponse(BaseModel):
    verdict: ProofStatus
    depth: int = Field(..., description="Deepest level reached over all parts")
    certificates: List[CertificateModel] = Field(default_factory=list)
    open_branch: List[int] = Field(default_factory=list, description="Node ids from the root to the lowest open node")
    open_diagram: Optional[DiagramModel] = None
    saturated: bool = Field(False, description="The open node is a finite model where the goal fails")


class CheckResponse(BaseModel):
    ok: bool
    failure: Optional[str] = None
    node: Optional[int] = None


class NodeVerdictModel(BaseModel):
    id: int
    parent: Optional[int] = None
    depth: int
    verdicts: List[Verdict]


class ForceResponse(BaseModel):
    verdict: Verdict
    query: str
    tuples: List[List[int]]
    root: List[Verdict]
    nodes: List[NodeVerdictModel]
    skipped: int


class OracleResponse(BaseModel):
    valid: bool
    max_size: int
    checked: int = Field(..., description="Number of theory models inspected")
    countermodel: Optional[DiagramModel] = None
    assignment: Dict[str, int] = Field(default_factory=dict)


class HealthResponse(BaseModel):
    status: str
    engine_status: str
    timestamp: str
