import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from errors import (
    ArityError,
    DuplicateRelationError,
    FragmentError,
    NormalizationLimitError,
    TheorySyntaxError,
    UnboundVariableError,
    UndeclaredRelationError,
)

logger = logging.getLogger(__name__)

Context = Tuple[str, ...]


class FormulaNode:
    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Top(FormulaNode):
    pass


@dataclass(frozen=True)
class Bottom(FormulaNode):
    pass


@dataclass(frozen=True)
class Atom(FormulaNode):
    relation: str
    args: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Eq(FormulaNode):
    left: str
    right: str


@dataclass(frozen=True)
class And(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists(FormulaNode):
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall(FormulaNode):
    var: str
    body: "Formula"


Formula = Union[Top, Bottom, Atom, Eq, And, Or, Implies, Exists, Forall]

TRUE = Top()
FALSE = Bottom()


class Fragment(str, Enum):
    HORN = "horn"
    REGULAR = "regular"
    REGULAR_BOT = "regular_bot"
    POSITIVE_COHERENT = "positive_coherent"
    COHERENT = "coherent"
    FIRST_ORDER = "first_order"

    def within(self, other: "Fragment") -> bool:
        return other in _FRAGMENT_ORDER[self]


_FRAGMENT_ORDER: Dict[Fragment, FrozenSet[Fragment]] = {
    Fragment.HORN: frozenset(Fragment),
    Fragment.REGULAR: frozenset(set(Fragment) - {Fragment.HORN}),
    Fragment.REGULAR_BOT: frozenset({Fragment.REGULAR_BOT, Fragment.COHERENT, Fragment.FIRST_ORDER}),
    Fragment.POSITIVE_COHERENT: frozenset({Fragment.POSITIVE_COHERENT, Fragment.COHERENT, Fragment.FIRST_ORDER}),
    Fragment.COHERENT: frozenset({Fragment.COHERENT, Fragment.FIRST_ORDER}),
    Fragment.FIRST_ORDER: frozenset({Fragment.FIRST_ORDER}),
}


@dataclass(frozen=True)
class Signature:
    relations: Tuple[Tuple[str, int], ...] = ()

    @cached_property
    def _arities(self) -> Dict[str, int]:
        return dict(self.relations)

    def arity(self, name: str) -> Optional[int]:
        return self._arities.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._arities

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def extend(self, more: Iterable[Tuple[str, int]]) -> "Signature":
        added = [(name, arity) for name, arity in more if name not in self._arities]
        return Signature(self.relations + tuple(added))


@dataclass(frozen=True)
class Sequent:
    antecedent: Formula
    consequent: Formula
    context: Context = ()

    def __str__(self) -> str:
        return format_sequent(self)


def make_sequent(antecedent: Formula, consequent: Formula, context: Optional[Sequence[str]] = None) -> Sequent:
    """Build a sequent, defaulting to the canonical context and validating a given one"""
    canonical = sequent_context(antecedent, consequent)
    if context is None:
        return Sequent(antecedent, consequent, canonical)
    context = tuple(context)
    if len(set(context)) != len(context):
        raise UnboundVariableError(f"context {list(context)} repeats a variable")
    missing = [v for v in canonical if v not in context]
    if missing:
        raise UnboundVariableError(f"context {list(context)} misses free variables {missing}")
    return Sequent(antecedent, consequent, context)


HABITATIVE_AXIOM = Sequent(TRUE, Exists("x", Eq("x", "x")), ())


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: Tuple[Sequent, ...] = ()
    name: Optional[str] = None

    @property
    def fragment(self) -> Fragment:
        return fragment_of(*[f for s in self.axioms for f in (s.antecedent, s.consequent)])

    @property
    def habitative(self) -> bool:
        return any(alpha_equal_sequents(axiom, HABITATIVE_AXIOM) for axiom in self.axioms)

    def __str__(self) -> str:
        return pretty_theory(self)


# --- structural helpers ---------------------------------------------------

def conj(formulas: Iterable[Formula]) -> Formula:
    result: Optional[Formula] = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def disj(formulas: Iterable[Formula]) -> Formula:
    result: Optional[Formula] = None
    for f in formulas:
        result = f if result is None else Or(result, f)
    return FALSE if result is None else result


def exists_chain(variables: Sequence[str], body: Formula) -> Formula:
    for v in reversed(variables):
        body = Exists(v, body)
    return body


def conjuncts(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    if isinstance(f, Top):
        return ()
    return (f,)


def disjuncts(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return (f,)


def _collect_free(f: Formula, bound: FrozenSet[str], out: List[str]) -> None:
    if isinstance(f, Atom):
        names: Sequence[str] = f.args
    elif isinstance(f, Eq):
        names = (f.left, f.right)
    elif isinstance(f, (And, Or, Implies)):
        _collect_free(f.left, bound, out)
        _collect_free(f.right, bound, out)
        return
    elif isinstance(f, (Exists, Forall)):
        _collect_free(f.body, bound | {f.var}, out)
        return
    else:
        return
    for name in names:
        if name not in bound and name not in out:
            out.append(name)


def canonical_context(f: Formula) -> Context:
    """Free variables of f in order of first appearance"""
    out: List[str] = []
    _collect_free(f, frozenset(), out)
    return tuple(out)


def sequent_context(antecedent: Formula, consequent: Formula) -> Context:
    return canonical_context(And(antecedent, consequent))


def all_variables(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, (And, Or, Implies)):
        return all_variables(f.left) | all_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return all_variables(f.body) | {f.var}
    return frozenset()


def relations_of(f: Formula) -> FrozenSet[str]:
    if isinstance(f, Atom):
        return frozenset({f.relation})
    if isinstance(f, (And, Or, Implies)):
        return relations_of(f.left) | relations_of(f.right)
    if isinstance(f, (Exists, Forall)):
        return relations_of(f.body)
    return frozenset()


def formula_depth(f: Formula) -> int:
    if isinstance(f, (And, Or, Implies)):
        return 1 + max(formula_depth(f.left), formula_depth(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + formula_depth(f.body)
    return 1


def _features(f: Formula, out: set) -> None:
    if isinstance(f, Bottom):
        out.add("bottom")
    elif isinstance(f, Or):
        out.add("or")
    elif isinstance(f, Exists):
        out.add("exists")
    elif isinstance(f, (Implies, Forall)):
        out.add("first_order")
    if isinstance(f, (And, Or, Implies)):
        _features(f.left, out)
        _features(f.right, out)
    elif isinstance(f, (Exists, Forall)):
        _features(f.body, out)


def fragment_of(*formulas: Formula) -> Fragment:
    """Strictest fragment containing every given formula"""
    found: set = set()
    for f in formulas:
        _features(f, found)
    if "first_order" in found:
        return Fragment.FIRST_ORDER
    if "or" in found:
        return Fragment.COHERENT if "bottom" in found else Fragment.POSITIVE_COHERENT
    if "bottom" in found:
        return Fragment.REGULAR_BOT
    if "exists" in found:
        return Fragment.REGULAR
    return Fragment.HORN


def is_horn(f: Formula) -> bool:
    return all(isinstance(c, (Atom, Eq)) for c in conjuncts(f))


def fresh_var(base: str, avoid: Iterable[str]) -> str:
    """Numbered variant of base outside avoid; the ' suffix keeps it out of the user namespace"""
    taken = set(avoid)
    root = base.split("'")[0]
    n = 1
    while f"{root}'{n}" in taken:
        n += 1
    return f"{root}'{n}"


def substitute(f: Formula, mapping: Dict[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables"""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.relation, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: w for k, w in mapping.items() if k != f.var}
        free = set(canonical_context(f.body))
        inner = {k: w for k, w in inner.items() if k in free}
        if f.var in inner.values():
            renamed = fresh_var(f.var, set(inner.values()) | set(inner) | all_variables(f.body))
            inner[f.var] = renamed
            return type(f)(renamed, substitute(f.body, inner))
        return type(f)(f.var, substitute(f.body, inner))
    return f


def unshadow(f: Formula, scope: Iterable[str] = ()) -> Formula:
    """Rename every binder whose variable is already in scope; other names are kept"""
    bound = frozenset(scope)
    return _unshadow(f, bound, set(bound | all_variables(f)))


def _unshadow(f: Formula, scope: FrozenSet[str], avoid: Set[str]) -> Formula:
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_unshadow(f.left, scope, avoid), _unshadow(f.right, scope, avoid))
    if isinstance(f, (Exists, Forall)):
        var, body = f.var, f.body
        if var in scope:
            var = fresh_var(var, avoid)
            avoid.add(var)
            body = substitute(body, {f.var: var})
        return type(f)(var, _unshadow(body, scope | {var}, avoid))
    return f


# --- alpha equivalence ----------------------------------------------------

def _alpha(f: Formula, env: Dict[str, str], depth: int) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.relation, tuple(env.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(env.get(f.left, f.left), env.get(f.right, f.right))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_alpha(f.left, env, depth), _alpha(f.right, env, depth))
    if isinstance(f, (Exists, Forall)):
        name = f"_b{depth}"
        return type(f)(name, _alpha(f.body, {**env, f.var: name}, depth + 1))
    return f


def alpha_normal(f: Formula, context: Optional[Sequence[str]] = None) -> Formula:
    """Rename context variables to positional names and bound variables by binding depth"""
    if context is None:
        context = canonical_context(f)
    return _alpha(f, {v: f"_c{i}" for i, v in enumerate(context)}, 0)


def alpha_equal(f1: Formula, f2: Formula,
                context1: Optional[Sequence[str]] = None,
                context2: Optional[Sequence[str]] = None) -> bool:
    if context1 is None:
        context1 = canonical_context(f1)
    if context2 is None:
        context2 = canonical_context(f2)
    if len(context1) != len(context2):
        return False
    return alpha_normal(f1, context1) == alpha_normal(f2, context2)


def alpha_equal_sequents(s1: Sequent, s2: Sequent) -> bool:
    return alpha_equal(And(s1.antecedent, s1.consequent), And(s2.antecedent, s2.consequent),
                       s1.context, s2.context)


# --- canonical form -------------------------------------------------------

@dataclass(frozen=True)
class Head:
    variables: Tuple[str, ...]
    atoms: Tuple[Formula, ...]

    def formula(self) -> Formula:
        return exists_chain(self.variables, conj(self.atoms))


@dataclass(frozen=True)
class CanonicalAxiom:
    """A canonical-form sequent split into context, Horn body and disjunct heads; no heads means ⊥"""
    context: Context
    body: Tuple[Formula, ...]
    heads: Tuple[Head, ...]
    source: int = 0

    @property
    def is_regular(self) -> bool:
        return len(self.heads) == 1

    @property
    def is_horn(self) -> bool:
        return self.is_regular and not self.heads[0].variables

    def to_sequent(self) -> Sequent:
        consequent = disj(head.formula() for head in self.heads)
        return Sequent(conj(self.body), consequent, self.context)

    def __str__(self) -> str:
        return format_sequent(self.to_sequent())


_Clause = Tuple[Tuple[str, ...], Tuple[Formula, ...], FrozenSet[str]]


class _Normalizer:
    def __init__(self, limit: int, names: FrozenSet[str]):
        self.limit = limit
        self.names = set(names)

    def _check(self, clauses: List[_Clause]) -> List[_Clause]:
        if len(clauses) > self.limit:
            raise NormalizationLimitError(f"normal form exceeds {self.limit} disjuncts")
        return clauses

    def dnf(self, f: Formula, env: Dict[str, str], taken: FrozenSet[str]) -> List[_Clause]:
        if isinstance(f, Top):
            return [((), (), taken)]
        if isinstance(f, Bottom):
            return []
        if isinstance(f, Atom):
            return [((), (Atom(f.relation, tuple(env.get(a, a) for a in f.args)),), taken)]
        if isinstance(f, Eq):
            return [((), (Eq(env.get(f.left, f.left), env.get(f.right, f.right)),), taken)]
        if isinstance(f, Or):
            return self._check(self.dnf(f.left, env, taken) + self.dnf(f.right, env, taken))
        if isinstance(f, And):
            out: List[_Clause] = []
            for left_vars, left_atoms, left_taken in self.dnf(f.left, env, taken):
                for right_vars, right_atoms, right_taken in self.dnf(f.right, env, left_taken):
                    out.append((left_vars + right_vars, left_atoms + right_atoms, right_taken))
                self._check(out)
            return out
        if isinstance(f, Exists):
            name = f.var
            if name in taken:
                name = fresh_var(name, taken | self.names)
                self.names.add(name)
            return [((name,) + vs, atoms, t)
                    for vs, atoms, t in self.dnf(f.body, {**env, f.var: name}, taken | {name})]
        raise FragmentError(f"{format_formula(f)} is not coherent")


def canonical_parts(s: Sequent, limit: int = 10_000, source: int = 0) -> List[CanonicalAxiom]:
    """Canonical-form pieces of a coherent sequent, one per antecedent disjunct"""
    fragment = fragment_of(s.antecedent, s.consequent)
    if not fragment.within(Fragment.COHERENT):
        raise FragmentError(f"sequent {format_sequent(s)} is not coherent")
    names = frozenset(s.context) | all_variables(s.antecedent) | all_variables(s.consequent)
    normalizer = _Normalizer(limit, names)
    parts: List[CanonicalAxiom] = []
    for ante_vars, ante_atoms, _ in normalizer.dnf(s.antecedent, {}, frozenset(s.context)):
        context = s.context + ante_vars
        heads = tuple(Head(vs, atoms) for vs, atoms, _ in normalizer.dnf(s.consequent, {}, frozenset(context)))
        parts.append(CanonicalAxiom(context, ante_atoms, heads, source))
        if len(parts) > limit:
            raise NormalizationLimitError(f"normal form exceeds {limit} sequents")
    return parts


def normalize_sequent(s: Sequent, limit: int = 10_000) -> List[Sequent]:
    return [part.to_sequent() for part in canonical_parts(s, limit)]


def canonical_axioms(theory: Theory, limit: int = 10_000) -> Tuple[CanonicalAxiom, ...]:
    axioms: List[CanonicalAxiom] = []
    for index, axiom in enumerate(theory.axioms):
        axioms.extend(canonical_parts(axiom, limit, source=index))
    logger.debug(f"Normalized {len(theory.axioms)} axioms into {len(axioms)} canonical sequents")
    return tuple(axioms)


# --- formula families -----------------------------------------------------

def enumerate_formulas(signature: Signature, depth: int,
                       free: Sequence[str] = ("x",), bound: Sequence[str] = ("y",),
                       equality: bool = True) -> List[Formula]:
    """Every formula up to the given connective depth whose free variables lie in `free`"""
    pool = tuple(free) + tuple(v for v in bound if v not in free)
    atoms: List[Formula] = [TRUE, FALSE]
    for name, arity in signature.relations:
        atoms.extend(Atom(name, args) for args in product(pool, repeat=arity))
    if equality and pool:
        atoms.extend(Eq(a, b) for a, b in product(pool, repeat=2))
    by_depth: List[List[Formula]] = [[], atoms]
    for d in range(2, depth + 1):
        lower = [f for level in by_depth[1:d - 1] for f in level]
        newest = by_depth[d - 1]
        fresh = set(newest)
        level: List[Formula] = []
        for a, b in product(lower + newest, repeat=2):
            if a in fresh or b in fresh:
                level.extend((And(a, b), Or(a, b), Implies(a, b)))
        for var in bound:
            for body in newest:
                if var in canonical_context(body):
                    level.extend((Exists(var, body), Forall(var, body)))
        by_depth.append(level)
    allowed = set(free)
    seen: set = set()
    result: List[Formula] = []
    for level in by_depth[1:]:
        for f in level:
            if f not in seen and set(canonical_context(f)) <= allowed:
                seen.add(f)
                result.append(f)
    return result


# --- theory DSL -----------------------------------------------------------

GRAMMAR = r"""
start: _item*

_item: header | declaration | axiom | habitative

header: "theory" NAME
declaration: "rel" reldecl ("," reldecl)* "."
reldecl: REL "/" INT
axiom: "axiom" formula "|-" formula context? "."
habitative: "habitative" "."
context: "ctx" VAR ("," VAR)*

sequent_input: formula "|-" formula context?
formula_input: formula context?

?formula: implication
?implication: disjunction
    | disjunction "->" implication -> implies
?disjunction: conjunction
    | disjunction "|" conjunction -> or_
?conjunction: unary
    | conjunction "&" unary -> and_
?unary: "exists" VAR "." unary -> exists
    | "forall" VAR "." unary -> forall
    | primary
?primary: "true" -> true
    | "false" -> false
    | REL "(" [VAR ("," VAR)*] ")" -> atom
    | REL -> atom
    | VAR "=" VAR -> eq
    | "(" formula ")"

NAME: /[A-Za-z_][A-Za-z0-9_]*/
REL: /[A-Z][A-Za-z0-9_]*(?:#[0-9a-f]{8})?/
VAR: /[a-z][A-Za-z0-9_]*(?:'[0-9]+)?/
COMMENT: /#[^\n]*/

%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, parser="lalr", start=["start", "sequent_input", "formula_input"])


def _canonical_sequent(antecedent: Formula, consequent: Formula, context: Optional[Context]) -> Sequent:
    """Sequent whose binders shadow neither the context nor a free variable"""
    scope = set(context or ()) | set(sequent_context(antecedent, consequent))
    return make_sequent(unshadow(antecedent, scope), unshadow(consequent, scope), context)


@v_args(inline=True)
class _TheoryBuilder(Transformer):
    def __init__(self, signature: Optional[Signature] = None):
        super().__init__()
        self.relations: Dict[str, int] = dict(signature.relations) if signature else {}
        self.order: List[Tuple[str, int]] = list(signature.relations) if signature else []
        self.name: Optional[str] = None
        self.axioms: List[Sequent] = []

    def header(self, name: Token) -> None:
        self.name = str(name)

    def reldecl(self, name: Token, arity: Token) -> None:
        if str(name) in self.relations:
            raise DuplicateRelationError(f"relation {name} declared twice", name.line, name.column)
        self.relations[str(name)] = int(arity)
        self.order.append((str(name), int(arity)))

    def declaration(self, *_) -> None:
        return None

    def context(self, *names: Token) -> Context:
        return tuple(str(n) for n in names)

    def axiom(self, antecedent: Formula, consequent: Formula, context: Optional[Context] = None) -> None:
        self.axioms.append(_canonical_sequent(antecedent, consequent, context))

    def habitative(self) -> None:
        self.axioms.append(HABITATIVE_AXIOM)

    def sequent_input(self, antecedent: Formula, consequent: Formula, context: Optional[Context] = None) -> Sequent:
        return _canonical_sequent(antecedent, consequent, context)

    def formula_input(self, formula: Formula, context: Optional[Context] = None) -> Tuple[Formula, Context]:
        if context is None:
            return unshadow(formula, canonical_context(formula)), canonical_context(formula)
        missing = [v for v in canonical_context(formula) if v not in context]
        if missing or len(set(context)) != len(context):
            raise UnboundVariableError(f"context {list(context)} does not cover free variables of {formula}")
        return unshadow(formula, context), context

    def implies(self, left: Formula, right: Formula) -> Formula:
        return Implies(left, right)

    def or_(self, left: Formula, right: Formula) -> Formula:
        return Or(left, right)

    def and_(self, left: Formula, right: Formula) -> Formula:
        return And(left, right)

    def exists(self, var: Token, body: Formula) -> Formula:
        return Exists(str(var), body)

    def forall(self, var: Token, body: Formula) -> Formula:
        return Forall(str(var), body)

    def true(self) -> Formula:
        return TRUE

    def false(self) -> Formula:
        return FALSE

    def eq(self, left: Token, right: Token) -> Formula:
        return Eq(str(left), str(right))

    def atom(self, name: Token, *args: Optional[Token]) -> Formula:
        arguments = tuple(str(a) for a in args if a is not None)
        arity = self.relations.get(str(name))
        if arity is None:
            raise UndeclaredRelationError(f"relation {name} is not declared", name.line, name.column)
        if arity != len(arguments):
            raise ArityError(f"relation {name} has arity {arity}, used with {len(arguments)} arguments",
                             name.line, name.column)
        return Atom(str(name), arguments)


def _run(text: str, start: str, builder: _TheoryBuilder):
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedCharacters as e:
        raise TheorySyntaxError(f"unexpected character {e.char!r}", e.line, e.column, list(e.allowed or ())) from None
    except UnexpectedToken as e:
        raise TheorySyntaxError(f"unexpected token {str(e.token)!r}", e.line, e.column, list(e.expected)) from None
    except UnexpectedEOF as e:
        raise TheorySyntaxError("unexpected end of input", None, None, list(e.expected)) from None
    except UnexpectedInput as e:
        raise TheorySyntaxError(str(e), getattr(e, "line", None), getattr(e, "column", None)) from None
    try:
        return builder.transform(tree)
    except VisitError as e:
        raise e.orig_exc from None


def parse_theory(text: str) -> Theory:
    builder = _TheoryBuilder()
    _run(text, "start", builder)
    theory = Theory(Signature(tuple(builder.order)), tuple(builder.axioms), builder.name)
    logger.debug(f"Parsed theory {theory.name or '<anonymous>'} with {len(theory.axioms)} axioms")
    return theory


def parse_sequent(text: str, signature: Signature) -> Sequent:
    return _run(text, "sequent_input", _TheoryBuilder(signature))


def parse_formula(text: str, signature: Signature) -> Tuple[Formula, Context]:
    return _run(text, "formula_input", _TheoryBuilder(signature))


# --- pretty printing ------------------------------------------------------

def _level(f: Formula) -> int:
    if isinstance(f, Implies):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    if isinstance(f, (Exists, Forall)):
        return 4
    return 5


def _wrap(f: Formula, minimum: int) -> str:
    text = format_formula(f)
    return text if _level(f) >= minimum else f"({text})"


def format_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f"{f.relation}({', '.join(f.args)})" if f.args else f.relation
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, And):
        return f"{_wrap(f.left, 3)} & {_wrap(f.right, 4)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 2)} | {_wrap(f.right, 3)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left, 2)} -> {_wrap(f.right, 1)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {_wrap(f.body, 4)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {_wrap(f.body, 4)}"
    raise TypeError(f"not a formula: {f!r}")


def format_sequent(s: Sequent) -> str:
    text = f"{format_formula(s.antecedent)} |- {format_formula(s.consequent)}"
    if s.context != sequent_context(s.antecedent, s.consequent):
        text += f" ctx {', '.join(s.context)}"
    return text


def pretty_theory(theory: Theory) -> str:
    lines: List[str] = []
    if theory.name:
        lines.append(f"theory {theory.name}")
    if theory.signature.relations:
        decls = ", ".join(f"{name}/{arity}" for name, arity in theory.signature.relations)
        lines.append(f"rel {decls}.")
    for axiom in theory.axioms:
        if axiom == HABITATIVE_AXIOM:
            lines.append("habitative.")
        else:
            lines.append(f"axiom {format_sequent(axiom)}.")
    return "\n".join(lines) + "\n"
