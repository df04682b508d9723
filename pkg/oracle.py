import logging
from itertools import product
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from config import ENGINE_CONFIG
from diagram import Diagram, DiagramBuilder, ElementId, Fact, satisfies, sequent_holds
from errors import BoundExceededError
from syntax import Sequent, Signature, Theory

logger = logging.getLogger(__name__)

HARD_MAX_SIZE = ENGINE_CONFIG["oracle_hard_cap"]
MAX_FACT_ATOMS = ENGINE_CONFIG["fact_space_exponent"]


class EnumerationBound(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    signature: Signature
    max_size: int = Field(3, ge=0)

    def fact_atoms(self, size: Optional[int] = None) -> int:
        """Number of relational facts over a discrete domain of the given size"""
        size = self.max_size if size is None else size
        return sum(size ** arity for _, arity in self.signature.relations)

    def check(self) -> None:
        if self.max_size > HARD_MAX_SIZE:
            raise BoundExceededError(f"domain size {self.max_size} exceeds the limit of {HARD_MAX_SIZE}")
        atoms = self.fact_atoms()
        if atoms > MAX_FACT_ATOMS:
            raise BoundExceededError(f"{atoms} fact atoms exceed the limit of {MAX_FACT_ATOMS}")


def _partitions(n: int) -> Iterator[Tuple[int, ...]]:
    """Restricted growth strings: block index of each element"""
    if n == 0:
        yield ()
        return

    def grow(prefix: List[int], top: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for block in range(top + 2):
            yield from grow(prefix + [block], max(top, block))

    yield from grow([0], 0)


def _diagrams_over(signature: Signature, blocks: Tuple[int, ...]) -> Iterator[Diagram]:
    elements = [ElementId(i) for i in range(len(blocks))]
    leaders: Dict[int, ElementId] = {}
    for e, block in zip(elements, blocks):
        leaders.setdefault(block, e)
    reps = sorted(leaders.values())
    slots = [Fact(name, args) for name, arity in signature.relations for args in product(reps, repeat=arity)]
    for mask in range(1 << len(slots)):
        builder = DiagramBuilder()
        for e in elements:
            builder.add_element(e)
        for e, block in zip(elements, blocks):
            if leaders[block] != e:
                builder.add_equality(e, leaders[block])
        for i, fact in enumerate(slots):
            if mask >> i & 1:
                builder.add_fact(fact)
        yield builder.freeze()


def all_diagrams(signature: Signature, k: int, discrete: bool = False) -> Iterator[Diagram]:
    """Every diagram on at most k elements, one per partition and fact set over class leaders"""
    EnumerationBound(signature=signature, max_size=k).check()
    for size in range(k + 1):
        partitions = [tuple(range(size))] if discrete else list(_partitions(size))
        for blocks in partitions:
            yield from _diagrams_over(signature, blocks)


def models_of(t: Theory, bound: EnumerationBound, discrete: bool = True) -> Iterator[Diagram]:
    for d in all_diagrams(bound.signature, bound.max_size, discrete):
        if all(sequent_holds(d, axiom) for axiom in t.axioms):
            yield d


class OracleResult(NamedTuple):
    valid: bool
    checked: int
    countermodel: Optional[Diagram]
    assignment: Dict[str, ElementId]


def search(t: Theory, s: Sequent, bound: EnumerationBound) -> OracleResult:
    """Look for a model of t up to the bound in which s fails; quotients keep satisfaction, so discrete ones suffice"""
    checked = 0
    for d in models_of(t, bound, discrete=True):
        checked += 1
        for combo in product(d.representatives(), repeat=len(s.context)):
            assignment = dict(zip(s.context, combo))
            if satisfies(d, s.antecedent, assignment) and not satisfies(d, s.consequent, assignment):
                logger.info(f"Countermodel of size {len(d)} after {checked} models")
                return OracleResult(False, checked, d, assignment)
    logger.info(f"No countermodel among {checked} models up to size {bound.max_size}")
    return OracleResult(True, checked, None, {})


def find_countermodel(t: Theory, s: Sequent, bound: EnumerationBound) -> Optional[Tuple[Diagram, Dict[str, ElementId]]]:
    result = search(t, s, bound)
    return None if result.valid else (result.countermodel, result.assignment)


def valid(t: Theory, s: Sequent, bound: EnumerationBound) -> bool:
    return search(t, s, bound).valid


def bound_for(t: Theory, max_size: int = 3, extra: Sequence[Tuple[str, int]] = ()) -> EnumerationBound:
    return EnumerationBound(signature=t.signature.extend(extra), max_size=max_size)
