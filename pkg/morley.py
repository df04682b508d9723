import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import ENGINE_CONFIG
from cover import prove
from diagram import EQUALITY, ElementId, Fact
from errors import EngineError, UnknownRelationError
from models import MorleyTarget
from syntax import (
    TRUE,
    And,
    Atom,
    Bottom,
    Context,
    Eq,
    Exists,
    Forall,
    Formula,
    Fragment,
    Implies,
    Or,
    Sequent,
    Signature,
    Theory,
    Top,
    alpha_normal,
    canonical_context,
    format_formula,
    normalize_sequent,
    substitute,
)

logger = logging.getLogger(__name__)

THRY = "Thry"
ATOM = "Atom"
TRUTH = "True"
CONJ = "Conj"
EXIST = "Exist"
DISJ = "Disj"
FALSITY = "False"
CONNECTIVE = "connective"


def _key(f: Formula) -> str:
    return format_formula(alpha_normal(f))


def predicate_name(f: Formula) -> str:
    """Stable name shared by every alpha-variant of f"""
    return "P#" + hashlib.sha1(_key(f).encode("utf-8")).hexdigest()[:8]


def _immediate(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (And, Or, Implies)):
        return f.left, f.right
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return ()


def subformula_closure(t: Theory, extras: Iterable[Formula] = ()) -> Tuple[Formula, ...]:
    """Axiom subformulas and extras, closed under immediate subformulas, one per alpha class"""
    seen: Dict[str, Formula] = {}
    stack: List[Formula] = []
    roots = [f for axiom in t.axioms for f in (axiom.antecedent, axiom.consequent)] + list(extras)
    for root in roots:
        stack.append(root)
        while stack:
            f = stack.pop()
            key = _key(f)
            if key in seen:
                continue
            seen[key] = f
            stack.extend(reversed(_immediate(f)))
    return tuple(seen.values())


@dataclass(frozen=True)
class MorleyMap:
    base: Signature
    closure: Tuple[Formula, ...]
    target: MorleyTarget

    @cached_property
    def _by_key(self) -> Dict[str, Formula]:
        return {_key(f): f for f in self.closure}

    @cached_property
    def _by_name(self) -> Dict[str, Formula]:
        return {predicate_name(f): f for f in self.closure}

    def predicate(self, f: Formula) -> str:
        if _key(f) not in self._by_key:
            raise UnknownRelationError(f"{format_formula(f)} is not in the subformula closure")
        return predicate_name(f)

    def atom(self, f: Formula) -> Atom:
        """P_f applied to the canonical context of f"""
        return Atom(self.predicate(f), canonical_context(f))

    def formula(self, name: str) -> Formula:
        if name not in self._by_name:
            raise UnknownRelationError(f"{name} names no formula of the closure")
        return self._by_name[name]

    def __contains__(self, f: object) -> bool:
        return _key(f) in self._by_key

    @property
    def falsum(self) -> Optional[str]:
        return predicate_name(Bottom()) if Bottom() in self else None

    def relations(self) -> Tuple[Tuple[str, int], ...]:
        return tuple((predicate_name(f), len(canonical_context(f))) for f in self.closure)

    def aliases(self) -> Dict[str, str]:
        return {predicate_name(f): format_formula(f) for f in self.closure}


@dataclass(frozen=True)
class MorleyTheory:
    base: Theory
    result: Theory
    map: MorleyMap
    tags: Tuple[str, ...]

    @property
    def falsum(self) -> Optional[str]:
        return self.map.falsum


def _both(left: Formula, right: Formula, context: Context, tag: str) -> List[Tuple[Sequent, str]]:
    return [(Sequent(left, right, context), tag), (Sequent(right, left, context), tag)]


def _schema(m: MorleyMap, f: Formula, coherent: bool) -> List[Tuple[Sequent, str]]:
    p = m.atom(f)
    context = canonical_context(f)
    if isinstance(f, (Atom, Eq)):
        return _both(p, f, context, ATOM)
    if isinstance(f, Top):
        return _both(p, TRUE, context, TRUTH)
    if isinstance(f, And):
        return _both(p, And(m.atom(f.left), m.atom(f.right)), context, CONJ)
    if isinstance(f, Exists):
        return _both(p, Exists(f.var, m.atom(f.body)), context, EXIST)
    if isinstance(f, Or):
        left, right = m.atom(f.left), m.atom(f.right)
        out = [(Sequent(left, p, context), CONNECTIVE), (Sequent(right, p, context), CONNECTIVE)]
        if coherent:
            out += _both(p, Or(left, right), context, DISJ)
        return out
    if isinstance(f, Bottom):
        return _both(p, Bottom(), context, FALSITY) if coherent else []
    if isinstance(f, Implies):
        return [(Sequent(And(m.atom(f.left), p), m.atom(f.right), context), CONNECTIVE),
                (Sequent(m.atom(f.right), p, context), CONNECTIVE)]
    if isinstance(f, Forall):
        return [(Sequent(p, m.atom(f.body), (f.var,) + context), CONNECTIVE)]
    raise TypeError(f"not a formula: {f!r}")


def derives(t: Theory, s: Sequent, max_depth: int = ENGINE_CONFIG["derivation_depth"]) -> bool:
    """Whether the cover search proves every canonical part of s from t within max_depth"""
    if not t.fragment.within(Fragment.COHERENT):
        return False
    try:
        return all(prove(t, part, max_depth).proved for part in normalize_sequent(s))
    except EngineError:
        return False


def derived_implications(t: Theory, closure: Sequence[Formula],
                         max_depth: int = ENGINE_CONFIG["derivation_depth"]) -> Tuple[Formula, ...]:
    """Closure implications φ → ψ, other than axiom images, whose sequent φ ⊢ ψ t proves"""
    axioms = {_key(Implies(a.antecedent, a.consequent)) for a in t.axioms}
    found = []
    for f in closure:
        if not isinstance(f, Implies) or _key(f) in axioms:
            continue
        if derives(t, Sequent(f.left, f.right, canonical_context(f)), max_depth):
            found.append(f)
    return tuple(found)


def _commuted(m: MorleyMap, f: Formula) -> Optional[Or]:
    if not isinstance(f, Or):
        return None
    swapped = Or(f.right, f.left)
    return swapped if swapped in m and _key(swapped) != _key(f) else None


def morleyize(t: Theory, extras: Sequence[Formula] = (), target: MorleyTarget = MorleyTarget.REGULAR,
              derivation_depth: int = ENGINE_CONFIG["derivation_depth"]) -> MorleyTheory:
    """Name every closure formula by a fresh predicate and emit the defining schemas"""
    closure = subformula_closure(t, extras)
    m = MorleyMap(t.signature, closure, target)
    coherent = target == MorleyTarget.COHERENT
    produced: List[Tuple[Sequent, str]] = []
    for axiom in t.axioms:
        produced.append((Sequent(m.atom(axiom.antecedent), m.atom(axiom.consequent), axiom.context), THRY))
        implication = Implies(axiom.antecedent, axiom.consequent)
        if implication in m:
            produced.append((Sequent(TRUE, m.atom(implication), axiom.context), THRY))
    for f in derived_implications(t, closure, derivation_depth):
        produced.append((Sequent(TRUE, m.atom(f), canonical_context(f)), THRY))
    for f in closure:
        swapped = _commuted(m, f)
        if swapped is not None:
            produced.append((Sequent(m.atom(f), m.atom(swapped), canonical_context(f)), THRY))
    for f in closure:
        produced.extend(_schema(m, f, coherent))
    if m.falsum is not None:
        falsum = m.atom(Bottom())
        for f in closure:
            if not isinstance(f, Bottom):
                produced.append((Sequent(falsum, m.atom(f), canonical_context(f)), CONNECTIVE))
    signature = t.signature.extend(m.relations())
    name = f"{t.name}_m" if t.name else None
    result = Theory(signature, tuple(s for s, _ in produced), name)
    logger.debug(f"Morleyized {len(t.axioms)} axioms over {len(closure)} formulas into {len(produced)} axioms")
    return MorleyTheory(t, result, m, tuple(tag for _, tag in produced))


def expected_axiom_count(t: Theory, closure: Sequence[Formula], target: MorleyTarget,
                         derivation_depth: int = ENGINE_CONFIG["derivation_depth"]) -> int:
    """Size of morleyize's output: linear in the closure and the axioms"""
    keys = {_key(f) for f in closure}
    m = MorleyMap(t.signature, tuple(closure), target)
    count = len(t.axioms) + sum(1 for a in t.axioms if _key(Implies(a.antecedent, a.consequent)) in keys)
    count += len(derived_implications(t, closure, derivation_depth))
    coherent = target == MorleyTarget.COHERENT
    for f in closure:
        if _commuted(m, f) is not None:
            count += 1
        if isinstance(f, (Atom, Eq, Top, And, Exists, Implies)):
            count += 2
        elif isinstance(f, Or):
            count += 4 if coherent else 2
        elif isinstance(f, Bottom):
            count += 2 if coherent else 0
        else:
            count += 1
    if _key(Bottom()) in keys:
        count += len(closure) - 1
    return count


def unfold(m: MorleyMap, f: Formula) -> Formula:
    """Replace each closure predicate by its formula at the atom's arguments"""
    if isinstance(f, Atom) and f.relation not in m.base:
        body = m.formula(f.relation)
        return substitute(body, dict(zip(canonical_context(body), f.args)))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(unfold(m, f.left), unfold(m, f.right))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, unfold(m, f.body))
    return f


def atomize(m: MorleyMap, f: Formula) -> Atom:
    """The single predicate atom a formula over closure predicates is equivalent to"""
    return m.atom(unfold(m, f))


@dataclass(frozen=True)
class Instance:
    formula: Formula
    context: Context
    elements: Tuple[ElementId, ...]

    def __str__(self) -> str:
        return format_formula(substitute(self.formula, {v: str(e) for v, e in zip(self.context, self.elements)}))


def demorleyize_fact(m: MorleyMap, fact: Fact) -> Instance:
    if fact.relation == EQUALITY:
        return Instance(Eq("x0", "x1"), ("x0", "x1"), fact.args)
    if fact.relation in m.base:
        if m.base.arity(fact.relation) != len(fact.args):
            raise UnknownRelationError(f"{fact} does not match the arity of {fact.relation}")
        variables = tuple(f"x{i}" for i in range(len(fact.args)))
        return Instance(Atom(fact.relation, variables), variables, fact.args)
    body = m.formula(fact.relation)
    context = canonical_context(body)
    if len(context) != len(fact.args):
        raise UnknownRelationError(f"{fact} does not match the arity of {fact.relation}")
    return Instance(body, context, fact.args)
