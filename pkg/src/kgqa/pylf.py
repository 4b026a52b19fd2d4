"""PyLF logical forms: AST, concrete syntax, typing, validation, profiling.

PyLF is a Python-call-styled query language over a schema-annotated KG.
The concrete grammar (EBNF, whitespace insensitive):

    program   = { binding } , expr , { binding } ;
    binding   = NAME , "=" , expr ;
    expr      = call | STRING | NUMBER | NAME ;          (* NAME: bound var *)
    call      = "START" "(" leaf ")"
              | "JOIN"  "(" STRING "," expr [ "," negarg ] ")"
              | "AND"   "(" expr "," expr { "," expr } ")"
              | "COUNT" "(" expr ")"
              | "ARG"   "(" STRING "," expr "," STRING ")"
              | "CMP"   "(" STRING "," STRING "," bound ")"
              | "STOP"  "(" expr ")" ;
    leaf      = STRING | NUMBER ;
    bound     = NUMBER | STRING ;
    negarg    = "neg" "=" ("True" | "False") | "True" | "False" ;

A bare STRING or NUMBER in expression position is shorthand for START(...).
A relation string starting with ``R_`` marks a reversed join (the answer is
drawn from the tail side).  Structural rules: STOP wraps the root and appears
nowhere else; COUNT may appear only directly inside STOP; n-ary AND is
left-nested into binary nodes.

The canonical printer always emits ``neg=``, single quotes, and one space
after commas; ``parse_pylf(print_pylf(e))`` is structurally equal to ``e``
for every parser-producible expression.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Union

from .errors import DataError, KgqaError
from .kg import (
    COMPARABLE_TAGS,
    NUMERIC_TAGS,
    AttributeValue,
    KnowledgeGraph,
)

ARG_MODES = ("argmin", "argmax")
CMP_OPS = ("<", "<=", ">", ">=")
_FUNCTIONS = ("START", "JOIN", "AND", "COUNT", "ARG", "CMP", "STOP")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mention:
    """An unresolved surface mention of an entity."""

    surface: str

    def __post_init__(self):
        if not self.surface.strip():
            raise ValueError("mention must be non-empty")


@dataclass(frozen=True)
class EntityRef:
    """A resolved reference to a KG entity id."""

    id: str


@dataclass(frozen=True)
class RelationRef:
    """A relation slot: an unresolved mention or a resolved relation id."""

    name: str
    resolved: bool = False

    def __post_init__(self):
        if not self.name.strip():
            raise ValueError("relation reference must be non-empty")


Leaf = Union[Mention, EntityRef, AttributeValue]


@dataclass(frozen=True)
class Start:
    leaf: Leaf


@dataclass(frozen=True)
class Join:
    rel: RelationRef
    inner: "Expr"
    reversed: bool = False
    neg: bool = False


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Count:
    inner: "Expr"


@dataclass(frozen=True)
class Arg:
    mode: str
    inner: "Expr"
    rel: RelationRef

    def __post_init__(self):
        if self.mode not in ARG_MODES:
            raise ValueError(f"ARG mode must be one of {ARG_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class Cmp:
    op: str
    rel: RelationRef
    bound: AttributeValue

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"CMP operator must be one of {CMP_OPS}, got {self.op!r}")


@dataclass(frozen=True)
class Stop:
    inner: "Expr"


Expr = Union[Start, Join, And, Count, Arg, Cmp, Stop]


def children(expr: Expr) -> tuple:
    """Expression children of a node (relation slots and leaves excluded)."""
    if isinstance(expr, (Stop, Count)):
        return (expr.inner,)
    if isinstance(expr, Join):
        return (expr.inner,)
    if isinstance(expr, Arg):
        return (expr.inner,)
    if isinstance(expr, And):
        return (expr.left, expr.right)
    return ()


def walk(expr: Expr):
    """Pre-order traversal."""
    yield expr
    for child in children(expr):
        yield from walk(child)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class PylfParseError(DataError):
    """Concrete-syntax error; carries the character offset when known."""

    def __init__(self, message: str, pos: Optional[int] = None):
        suffix = f" (at offset {pos})" if pos is not None else ""
        super().__init__(message + suffix)
        self.pos = pos


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
      | (?P<string>'[^']*'|"[^"]*")
      | (?P<sym>[(),=])
    """,
    re.X,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise PylfParseError(f"unexpected character {text[i]!r}", pos=i)
        i = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append(_Token(kind=kind, text=m.group(), pos=m.start()))
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Optional[_Token]:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise PylfParseError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text:
            raise PylfParseError(f"expected {text!r}, got {tok.text!r}", pos=tok.pos)
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    # -- grammar -------------------------------------------------------------

    def parse_program(self) -> Expr:
        env: dict = {}
        last: Optional[Expr] = None
        while not self.at_end():
            tok = self.peek()
            nxt = self.peek(1)
            if (
                tok.kind == "name"
                and tok.text.upper() not in _FUNCTIONS
                and tok.text not in ("True", "False")
                and nxt is not None
                and nxt.text == "="
            ):
                name = self.take().text
                self.expect("=")
                env[name] = self.parse_expr(env)
                last = env[name]
            else:
                last = self.parse_expr(env)
        if last is None:
            raise PylfParseError("empty input")
        return last

    def parse_expr(self, env: dict) -> Expr:
        tok = self.take()
        if tok.kind == "number":
            return Start(leaf=_number_literal(tok.text))
        if tok.kind == "string":
            return Start(leaf=Mention(surface=_unquote(tok)))
        if tok.kind == "name":
            upper = tok.text.upper()
            if upper in _FUNCTIONS:
                return self.parse_call(upper, tok.pos, env)
            if tok.text in env:
                return env[tok.text]
            follows_call = self.peek() is not None and self.peek().text == "("
            if follows_call:
                raise PylfParseError(f"unknown function {tok.text!r}", pos=tok.pos)
            raise PylfParseError(f"undefined variable {tok.text!r}", pos=tok.pos)
        raise PylfParseError(f"unexpected token {tok.text!r}", pos=tok.pos)

    def parse_call(self, func: str, pos: int, env: dict) -> Expr:
        self.expect("(")
        if func == "START":
            node = self._parse_start(pos)
        elif func == "JOIN":
            node = self._parse_join(pos, env)
        elif func == "AND":
            node = self._parse_and(pos, env)
        elif func == "COUNT":
            node = Count(inner=self.parse_expr(env))
        elif func == "ARG":
            node = self._parse_arg(pos, env)
        elif func == "CMP":
            node = self._parse_cmp(pos)
        else:
            node = Stop(inner=self.parse_expr(env))
        tok = self.take()
        if tok.text == ",":
            raise PylfParseError(f"too many arguments to {func}", pos=tok.pos)
        if tok.text != ")":
            raise PylfParseError(f"expected ')', got {tok.text!r}", pos=tok.pos)
        return node

    def _parse_start(self, pos: int) -> Start:
        tok = self.take()
        if tok.kind == "string":
            return Start(leaf=Mention(surface=_unquote(tok)))
        if tok.kind == "number":
            return Start(leaf=_number_literal(tok.text))
        raise PylfParseError("START takes a quoted mention or a numeric literal", pos=tok.pos)

    def _parse_join(self, pos: int, env: dict) -> Join:
        rel = self._parse_relation()
        self.expect(",")
        inner = self.parse_expr(env)
        neg = False
        if self.peek() is not None and self.peek().text == ",":
            self.take()
            neg = self._parse_neg()
        return Join(rel=rel.ref, inner=inner, reversed=rel.reversed, neg=neg)

    def _parse_and(self, pos: int, env: dict) -> Expr:
        parts = [self.parse_expr(env)]
        while self.peek() is not None and self.peek().text == ",":
            self.take()
            parts.append(self.parse_expr(env))
        if len(parts) < 2:
            raise PylfParseError("AND takes at least two arguments", pos=pos)
        node: Expr = parts[0]
        for part in parts[1:]:
            node = And(left=node, right=part)
        return node

    def _parse_arg(self, pos: int, env: dict) -> Arg:
        tok = self.take()
        if tok.kind != "string":
            raise PylfParseError("ARG mode must be 'ARGMIN' or 'ARGMAX'", pos=tok.pos)
        mode = _unquote(tok).lower()
        if mode not in ARG_MODES:
            raise PylfParseError(f"ARG mode must be 'ARGMIN' or 'ARGMAX', got {mode!r}", pos=tok.pos)
        self.expect(",")
        inner = self.parse_expr(env)
        self.expect(",")
        rel = self._parse_relation()
        if rel.reversed:
            raise PylfParseError("ARG relation must not carry the R_ prefix", pos=pos)
        return Arg(mode=mode, inner=inner, rel=rel.ref)

    def _parse_cmp(self, pos: int) -> Cmp:
        tok = self.take()
        if tok.kind != "string":
            raise PylfParseError("CMP operator must be a quoted string", pos=tok.pos)
        op = _unquote(tok)
        if op not in CMP_OPS:
            raise PylfParseError(f"CMP operator must be one of {CMP_OPS}, got {op!r}", pos=tok.pos)
        self.expect(",")
        rel = self._parse_relation()
        if rel.reversed:
            raise PylfParseError("CMP relation must not carry the R_ prefix", pos=pos)
        self.expect(",")
        tok = self.take()
        if tok.kind == "number":
            bound = _number_literal(tok.text)
        elif tok.kind == "string":
            text = _unquote(tok)
            bound = AttributeValue.detect(text) or AttributeValue("string", text)
        else:
            raise PylfParseError("CMP bound must be a number, date, or quoted string", pos=tok.pos)
        return Cmp(op=op, rel=rel.ref, bound=bound)

    def _parse_relation(self):
        tok = self.take()
        if tok.kind != "string":
            raise PylfParseError("relation must be a quoted string", pos=tok.pos)
        text = _unquote(tok)
        reversed_ = text.startswith("R_")
        name = text[2:] if reversed_ else text
        if not name.strip():
            raise PylfParseError("relation name must be non-empty", pos=tok.pos)
        return _Rel(ref=RelationRef(name=name), reversed=reversed_)

    def _parse_neg(self) -> bool:
        tok = self.take()
        if tok.kind == "name" and tok.text == "neg":
            self.expect("=")
            tok = self.take()
        if tok.text in ("True", "False"):
            return tok.text == "True"
        raise PylfParseError(f"expected neg=True or neg=False, got {tok.text!r}", pos=tok.pos)


@dataclass(frozen=True)
class _Rel:
    ref: RelationRef
    reversed: bool


def _unquote(tok: _Token) -> str:
    return tok.text[1:-1]


def _number_literal(text: str) -> AttributeValue:
    if re.fullmatch(r"[+-]?\d+", text):
        return AttributeValue("integer", int(text))
    return AttributeValue("float", float(text))


def _check_structure(expr: Expr) -> None:
    if not isinstance(expr, Stop):
        raise PylfParseError("STOP(...) must wrap the root expression")

    def visit(node: Expr, parent: Optional[Expr]) -> None:
        if isinstance(node, Stop) and parent is not None:
            raise PylfParseError("STOP may appear only at the root")
        if isinstance(node, Count) and not isinstance(parent, Stop):
            raise PylfParseError("COUNT may appear only directly inside STOP")
        for child in children(node):
            visit(child, node)

    visit(expr, None)


def parse_pylf(text: str) -> Expr:
    """Parse concrete PyLF text (nested-call or variable-assignment style)."""
    expr = _Parser(_tokenize(text)).parse_program()
    _check_structure(expr)
    return expr


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def _print_leaf(leaf: Leaf) -> str:
    if isinstance(leaf, Mention):
        return f"'{leaf.surface}'"
    if isinstance(leaf, EntityRef):
        return f"'{leaf.id}'"
    return _print_literal(leaf)


def _print_literal(value: AttributeValue) -> str:
    if value.tag == "integer":
        return str(value.value)
    if value.tag == "float":
        return repr(value.value)
    return f"'{value.value}'"


def _print_relation(rel: RelationRef, reversed_: bool = False) -> str:
    prefix = "R_" if reversed_ else ""
    return f"'{prefix}{rel.name}'"


def print_pylf(expr: Expr) -> str:
    """Canonical text: explicit neg=, single quotes, one space after commas."""
    if isinstance(expr, Stop):
        return f"STOP({print_pylf(expr.inner)})"
    if isinstance(expr, Start):
        return f"START({_print_leaf(expr.leaf)})"
    if isinstance(expr, Join):
        rel = _print_relation(expr.rel, expr.reversed)
        return f"JOIN({rel}, {print_pylf(expr.inner)}, neg={expr.neg})"
    if isinstance(expr, And):
        return f"AND({print_pylf(expr.left)}, {print_pylf(expr.right)})"
    if isinstance(expr, Count):
        return f"COUNT({print_pylf(expr.inner)})"
    if isinstance(expr, Arg):
        return f"ARG('{expr.mode.upper()}', {print_pylf(expr.inner)}, {_print_relation(expr.rel)})"
    if isinstance(expr, Cmp):
        return f"CMP('{expr.op}', {_print_relation(expr.rel)}, {_print_literal(expr.bound)})"
    raise TypeError(f"not a PyLF expression: {expr!r}")


# ---------------------------------------------------------------------------
# Output types, validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntityClass:
    """The result is a set of entities drawn from these classes.

    Relation-derived types are singletons; a START over an entity carries
    the entity's full class set.
    """

    classes: frozenset

    @classmethod
    def of(cls, *names: str) -> "EntityClass":
        return cls(classes=frozenset(names))


@dataclass(frozen=True)
class Datatype:
    tag: str


@dataclass(frozen=True)
class IntegerCount:
    pass


OutputType = Union[EntityClass, Datatype, IntegerCount]


@dataclass(frozen=True)
class ValidationIssue:
    message: str
    node: Expr


class PylfTypeError(KgqaError):
    """Raised by infer_type when the expression is not schema-typable."""

    def __init__(self, issues):
        super().__init__("; ".join(i.message for i in issues))
        self.issues = list(issues)


class _TypeChecker:
    def __init__(self, kg: KnowledgeGraph):
        self.kg = kg
        self.issues: List[ValidationIssue] = []

    def fail(self, node: Expr, message: str) -> None:
        self.issues.append(ValidationIssue(message=message, node=node))

    def infer(self, node: Expr) -> Optional[OutputType]:
        if isinstance(node, Stop):
            return self.infer(node.inner)
        if isinstance(node, Start):
            return self._infer_start(node)
        if isinstance(node, Join):
            return self._infer_join(node)
        if isinstance(node, And):
            return self._infer_and(node)
        if isinstance(node, Count):
            inner = self.infer(node.inner)
            if isinstance(inner, IntegerCount):
                self.fail(node, "COUNT over a COUNT result")
                return None
            return IntegerCount()
        if isinstance(node, Arg):
            return self._infer_arg(node)
        if isinstance(node, Cmp):
            return self._infer_cmp(node)
        self.fail(node, f"unknown node {node!r}")
        return None

    def _infer_start(self, node: Start) -> Optional[OutputType]:
        leaf = node.leaf
        if isinstance(leaf, Mention):
            self.fail(node, f"unresolved mention {leaf.surface!r}")
            return None
        if isinstance(leaf, EntityRef):
            if not self.kg.has_entity(leaf.id):
                self.fail(node, f"unknown entity {leaf.id!r}")
                return None
            return EntityClass(classes=self.kg.classes_of(leaf.id))
        return Datatype(tag=leaf.tag)

    def _schema(self, node: Expr, rel: RelationRef):
        if not rel.resolved:
            self.fail(node, f"unresolved relation {rel.name!r}")
            return None
        st = self.kg.schema_for(rel.name)
        if st is None:
            self.fail(node, f"relation {rel.name!r} has no schema triple")
        return st

    def _infer_join(self, node: Join) -> Optional[OutputType]:
        inner = self.infer(node.inner)
        st = self._schema(node, node.rel)
        if st is None:
            return None
        if not node.reversed:
            # answer from the head side; inner sits on the range side
            if inner is not None:
                if st.range_is_datatype:
                    if not (isinstance(inner, Datatype) and inner.tag == st.range):
                        self.fail(node, f"JOIN inner must be a {st.range} literal for {st.r!r}")
                elif not (isinstance(inner, EntityClass) and st.range in inner.classes):
                    self.fail(node, f"JOIN inner is not an instance of {st.range!r} required by {st.r!r}")
            return EntityClass.of(st.domain)
        # reversed: answer from the tail side; inner sits on the domain side
        if inner is not None and not (isinstance(inner, EntityClass) and st.domain in inner.classes):
            self.fail(node, f"reversed JOIN inner is not an instance of {st.domain!r} required by {st.r!r}")
        if st.range_is_datatype:
            if node.neg:
                self.fail(node, f"negated reversed JOIN over datatype range {st.range!r} has no entity universe")
            return Datatype(tag=st.range)
        return EntityClass.of(st.range)

    def _infer_and(self, node: And) -> Optional[OutputType]:
        left = self.infer(node.left)
        right = self.infer(node.right)
        if left is None or right is None:
            return None
        if isinstance(left, EntityClass) and isinstance(right, EntityClass):
            common = left.classes & right.classes
            if not common:
                self.fail(node, "AND children have no class in common")
                return None
            return EntityClass(classes=common)
        if isinstance(left, Datatype) and isinstance(right, Datatype) and left.tag == right.tag:
            return left
        self.fail(node, "AND children have incompatible types")
        return None

    def _infer_arg(self, node: Arg) -> Optional[OutputType]:
        inner = self.infer(node.inner)
        st = self._schema(node, node.rel)
        if st is None:
            return None
        if not (st.range_is_datatype and st.range in COMPARABLE_TAGS):
            self.fail(node, f"ARG relation {st.r!r} range is not comparable (numeric or date)")
            return None
        if inner is not None and not (isinstance(inner, EntityClass) and st.domain in inner.classes):
            self.fail(node, f"ARG inner is not an instance of {st.domain!r} required by {st.r!r}")
        return EntityClass.of(st.domain)

    def _infer_cmp(self, node: Cmp) -> Optional[OutputType]:
        st = self._schema(node, node.rel)
        if st is None:
            return None
        if not (st.range_is_datatype and st.range in COMPARABLE_TAGS):
            self.fail(node, f"CMP relation {st.r!r} range is not comparable (numeric or date)")
            return None
        if node.bound.tag == "string":
            self.fail(node, "CMP bound must be numeric or a date, not a string")
            return None
        if st.range in NUMERIC_TAGS:
            if node.bound.tag not in NUMERIC_TAGS:
                self.fail(node, f"CMP bound tag {node.bound.tag!r} does not match numeric range of {st.r!r}")
                return None
        elif node.bound.tag != st.range:
            self.fail(node, f"CMP bound tag {node.bound.tag!r} does not match range {st.range!r} of {st.r!r}")
            return None
        return EntityClass.of(st.domain)


def validate(expr: Expr, kg: KnowledgeGraph) -> List[ValidationIssue]:
    """Schema-level validation; an empty list means the form is executable."""
    checker = _TypeChecker(kg)
    checker.infer(expr)
    return checker.issues


def infer_type(expr: Expr, kg: KnowledgeGraph) -> OutputType:
    """Output type per the schema; raises PylfTypeError on any issue."""
    checker = _TypeChecker(kg)
    out = checker.infer(expr)
    if checker.issues:
        raise PylfTypeError(checker.issues)
    assert out is not None
    return out


# ---------------------------------------------------------------------------
# Constraint profiling
# ---------------------------------------------------------------------------


FUNCTION_TYPES = ("none", "count", "comparative", "superlative")


@dataclass(frozen=True)
class ConstraintProfile:
    reasoning_paths: int
    calc_constraints: int
    has_negative: bool
    function_type: str

    @property
    def total(self) -> int:
        return self.reasoning_paths + self.calc_constraints


def profile_constraints(expr: Expr) -> ConstraintProfile:
    """Count reasoning paths, calculation constraints, and negation.

    A reasoning path is a maximal JOIN chain ending in a START leaf, so the
    count equals the number of START leaves under at least one JOIN.  COUNT,
    ARG, and CMP nodes each contribute one calculation constraint.  The
    function type follows the precedence superlative > comparative > count.
    """
    paths = 0
    calcs = 0
    has_negative = False
    has_arg = False
    has_cmp = False

    def visit(node: Expr, under_join: bool) -> None:
        nonlocal paths, calcs, has_negative, has_arg, has_cmp
        if isinstance(node, Start):
            if under_join:
                paths += 1
            return
        if isinstance(node, Join):
            if node.neg:
                has_negative = True
            visit(node.inner, True)
            return
        if isinstance(node, (Count, Arg, Cmp)):
            calcs += 1
            has_arg = has_arg or isinstance(node, Arg)
            has_cmp = has_cmp or isinstance(node, Cmp)
        for child in children(node):
            visit(child, under_join)

    root = expr.inner if isinstance(expr, Stop) else expr
    visit(root, False)

    if has_arg:
        function_type = "superlative"
    elif has_cmp:
        function_type = "comparative"
    elif isinstance(root, Count):
        function_type = "count"
    else:
        function_type = "none"
    return ConstraintProfile(
        reasoning_paths=paths,
        calc_constraints=calcs,
        has_negative=has_negative,
        function_type=function_type,
    )


# ---------------------------------------------------------------------------
# Exact-id resolution (for gold logical forms whose leaves are already ids)
# ---------------------------------------------------------------------------


def resolve_exact(expr: Expr, kg: KnowledgeGraph) -> Expr:
    """Ground an expression whose mentions are literal KG identifiers.

    Gold dataset forms name entities and relations by id; this maps each
    Mention to an EntityRef and marks each relation resolved, failing fast
    on anything unknown.
    """
    def res_rel(rel: RelationRef) -> RelationRef:
        if rel.resolved:
            return rel
        if kg.schema_for(rel.name) is None:
            raise DataError(f"unknown relation id {rel.name!r}")
        return RelationRef(name=rel.name, resolved=True)

    if isinstance(expr, Stop):
        return Stop(inner=resolve_exact(expr.inner, kg))
    if isinstance(expr, Start):
        leaf = expr.leaf
        if isinstance(leaf, Mention):
            if kg.has_entity(leaf.surface):
                return Start(leaf=EntityRef(id=leaf.surface))
            literal = AttributeValue.detect(leaf.surface)
            if literal is not None:
                return Start(leaf=literal)
            raise DataError(f"unknown entity id {leaf.surface!r}")
        return expr
    if isinstance(expr, Join):
        return Join(
            rel=res_rel(expr.rel),
            inner=resolve_exact(expr.inner, kg),
            reversed=expr.reversed,
            neg=expr.neg,
        )
    if isinstance(expr, And):
        return And(left=resolve_exact(expr.left, kg), right=resolve_exact(expr.right, kg))
    if isinstance(expr, Count):
        return Count(inner=resolve_exact(expr.inner, kg))
    if isinstance(expr, Arg):
        return Arg(mode=expr.mode, inner=resolve_exact(expr.inner, kg), rel=res_rel(expr.rel))
    if isinstance(expr, Cmp):
        return Cmp(op=expr.op, rel=res_rel(expr.rel), bound=expr.bound)
    raise TypeError(f"not a PyLF expression: {expr!r}")
