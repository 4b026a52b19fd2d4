"""Compile grounded PyLF into SPARQL, export graphs as N-Triples, and run
queries against a SPARQL 1.1 endpoint.

IRI scheme: entities mint as ``<kg:entity/ID>``, classes as
``<kg:class/NAME>``, relations as ``<kg:rel/NAME>``; class membership uses
``a`` (rdf:type).  Literals carry explicit XSD datatypes with canonical
lexical forms shared by the exporter and the compiler, so VALUES blocks match
seeded data term-for-term.

Variables are named v0, v1, ... in AST pre-order (STOP allocates nothing);
ARG recompiles its inner expression a second time inside FILTER NOT EXISTS,
continuing the counter, which keeps every variable collision-free.
"""

from __future__ import annotations

import json
import urllib.parse
from dataclasses import dataclass

import requests

from .errors import KgqaError, TransportError
from .executor import AnswerSet, Entities, Literals, Number
from .kg import AttributeValue, KnowledgeGraph
from .pylf import And, Arg, Cmp, Count, EntityRef, Expr, Join, Mention, Start, Stop

XSD = {
    "integer": "http://www.w3.org/2001/XMLSchema#integer",
    "float": "http://www.w3.org/2001/XMLSchema#double",
    "string": "http://www.w3.org/2001/XMLSchema#string",
    "date": "http://www.w3.org/2001/XMLSchema#date",
}
_TAG_BY_XSD = {iri: tag for tag, iri in XSD.items()}
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
NAME_PROP = "kg:prop/name"
_ENTITY_PREFIX = "kg:entity/"


class CompileError(KgqaError):
    """The expression cannot be compiled (unresolved or unsupported node)."""


class SparqlTransportError(TransportError):
    """Base for endpoint failures; see the concrete subclasses."""


class NetworkError(SparqlTransportError):
    pass


class RequestTimeoutError(SparqlTransportError):
    pass


class HttpStatusError(SparqlTransportError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"endpoint returned HTTP {status}: {body[:200]}")
        self.status = status


class MalformedResultError(SparqlTransportError):
    pass


@dataclass(frozen=True)
class SparqlQuery:
    text: str
    answer_variable: str
    is_count: bool = False


def _iri(prefix: str, name: str) -> str:
    return f"<{prefix}{urllib.parse.quote(name, safe='._-~')}>"


def entity_iri(entity_id: str) -> str:
    return _iri(_ENTITY_PREFIX, entity_id)


def class_iri(class_id: str) -> str:
    return _iri("kg:class/", class_id)


def relation_iri(relation_id: str) -> str:
    return _iri("kg:rel/", relation_id)


def rdf_literal(value: AttributeValue) -> str:
    lex = value.lexical().replace("\\", "\\\\").replace('"', '\\"')
    return f'"{lex}"^^<{XSD[value.tag]}>'


class _Compiler:
    def __init__(self, kg: KnowledgeGraph):
        self.kg = kg
        self.counter = 0

    def fresh(self) -> str:
        name = f"v{self.counter}"
        self.counter += 1
        return name

    def schema(self, node):
        if not node.rel.resolved:
            raise CompileError(f"unresolved relation {node.rel.name!r}")
        st = self.kg.schema_for(node.rel.name)
        if st is None:
            raise CompileError(f"relation {node.rel.name!r} has no schema triple")
        return st

    def visit(self, node: Expr):
        """Return (answer variable, pattern lines) for a value-producing node."""
        if isinstance(node, Start):
            return self._start(node)
        if isinstance(node, Join):
            return self._join(node)
        if isinstance(node, And):
            return self._and(node)
        if isinstance(node, Cmp):
            return self._cmp(node)
        if isinstance(node, Arg):
            return self._arg(node)
        raise CompileError(f"unsupported node in this position: {type(node).__name__}")

    def _start(self, node: Start):
        var = self.fresh()
        leaf = node.leaf
        if isinstance(leaf, Mention):
            raise CompileError(f"ungrounded mention {leaf.surface!r}")
        term = entity_iri(leaf.id) if isinstance(leaf, EntityRef) else rdf_literal(leaf)
        return var, [f"VALUES ?{var} {{ {term} }}"]

    def _join(self, node: Join):
        var = self.fresh()
        inner_var, inner_lines = self.visit(node.inner)
        rel = relation_iri(node.rel.name)
        st = self.schema(node)
        if not node.reversed:
            edge = f"?{var} {rel} ?{inner_var} ."
            if not node.neg:
                return var, inner_lines + [edge]
            lines = [f"?{var} a {class_iri(st.domain)} ."]
            lines += ["FILTER NOT EXISTS {"] + _indent(inner_lines + [edge]) + ["}"]
            return var, lines
        edge = f"?{inner_var} {rel} ?{var} ."
        if not node.neg:
            return var, inner_lines + [edge]
        if st.range_is_datatype:
            raise CompileError(f"negated reversed JOIN over datatype range {st.range!r}")
        lines = [f"?{var} a {class_iri(st.range)} ."]
        lines += ["FILTER NOT EXISTS {"] + _indent(inner_lines + [edge]) + ["}"]
        return var, lines

    def _and(self, node: And):
        var = self.fresh()
        left_var, left_lines = self.visit(node.left)
        right_var, right_lines = self.visit(node.right)
        lines = left_lines + right_lines
        lines.append(f"BIND(?{left_var} AS ?{var})")
        lines.append(f"FILTER(?{var} = ?{right_var})")
        return var, lines

    def _cmp(self, node: Cmp):
        var = self.fresh()
        attr = self.fresh()
        self.schema(node)
        rel = relation_iri(node.rel.name)
        return var, [
            f"?{var} {rel} ?{attr} .",
            f"FILTER(?{attr} {node.op} {rdf_literal(node.bound)})",
        ]

    def _arg(self, node: Arg):
        var = self.fresh()
        inner_var, inner_lines = self.visit(node.inner)
        attr = self.fresh()
        self.schema(node)
        rel = relation_iri(node.rel.name)
        rival_var, rival_lines = self.visit(node.inner)
        rival_attr = self.fresh()
        beats = ">" if node.mode == "argmax" else "<"
        lines = inner_lines + [
            f"BIND(?{inner_var} AS ?{var})",
            f"?{var} {rel} ?{attr} .",
            "FILTER NOT EXISTS {",
        ]
        lines += _indent(
            rival_lines
            + [
                f"?{rival_var} {rel} ?{rival_attr} .",
                f"FILTER(?{rival_attr} {beats} ?{attr})",
            ]
        )
        lines.append("}")
        return var, lines


def _indent(lines):
    return ["  " + line for line in lines]


def compile_query(expr: Expr, kg: KnowledgeGraph) -> SparqlQuery:
    """Compile a grounded expression into a single deterministic SELECT."""
    if not isinstance(expr, Stop):
        raise CompileError("root must be STOP")
    compiler = _Compiler(kg)
    inner = expr.inner
    if isinstance(inner, Count):
        count_var = compiler.fresh()
        body_var, lines = compiler.visit(inner.inner)
        header = f"SELECT (COUNT(DISTINCT ?{body_var}) AS ?{count_var})"
        answer_var, is_count = count_var, True
    else:
        body_var, lines = compiler.visit(inner)
        header = f"SELECT DISTINCT ?{body_var}"
        answer_var, is_count = body_var, False
    text = "\n".join([header, "WHERE {"] + _indent(lines) + ["}"])
    return SparqlQuery(text=text, answer_variable=answer_var, is_count=is_count)


def export_ntriples(kg: KnowledgeGraph) -> str:
    """Serialize a graph as N-Triples for seeding any standard endpoint."""
    lines = []
    for eid in sorted(kg.entities):
        rec = kg.entities[eid]
        for c in sorted(rec.classes):
            lines.append(f"{entity_iri(eid)} <{RDF_TYPE}> {class_iri(c)} .")
        name = rec.name.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'{entity_iri(eid)} <{NAME_PROP}> "{name}" .')
    for tr in sorted(kg.all_triples(), key=lambda t: (t.h, t.r, str(t.t))):
        obj = entity_iri(tr.t) if isinstance(tr.t, str) else rdf_literal(tr.t)
        lines.append(f"{entity_iri(tr.h)} {relation_iri(tr.r)} {obj} .")
    return "\n".join(lines) + "\n"


def _term_to_node(term: dict):
    kind = term.get("type")
    value = term.get("value", "")
    if kind == "uri":
        if value.startswith(_ENTITY_PREFIX):
            return urllib.parse.unquote(value[len(_ENTITY_PREFIX):])
        return value
    if kind in ("literal", "typed-literal"):
        tag = _TAG_BY_XSD.get(term.get("datatype", ""), "string")
        try:
            return AttributeValue.from_lexical(value, tag)
        except ValueError as exc:
            raise MalformedResultError(f"bad literal {value!r}: {exc}") from exc
    raise MalformedResultError(f"unsupported term type {kind!r}")


def execute_remote(query: SparqlQuery, endpoint: str, timeout: float = 30.0) -> AnswerSet:
    """POST the query and parse application/sparql-results+json.

    Transport problems raise distinct error kinds; an empty result set is a
    normal answer, never an error.
    """
    try:
        response = requests.post(
            endpoint,
            data=query.text.encode("utf-8"),
            headers={
                "Content-Type": "application/sparql-query",
                "Accept": "application/sparql-results+json",
            },
            timeout=timeout,
        )
    except requests.Timeout as exc:
        raise RequestTimeoutError(f"timeout after {timeout}s: {exc}") from exc
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    if response.status_code != 200:
        raise HttpStatusError(response.status_code, response.text)
    try:
        payload = response.json()
        bindings = payload["results"]["bindings"]
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedResultError(f"unparseable result payload: {exc}") from exc

    if query.is_count:
        if not bindings:
            return Number(value=0)
        try:
            return Number(value=int(bindings[0][query.answer_variable]["value"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedResultError(f"bad count binding: {exc}") from exc

    nodes = []
    for row in bindings:
        if query.answer_variable not in row:
            raise MalformedResultError(f"binding lacks ?{query.answer_variable}")
        nodes.append(_term_to_node(row[query.answer_variable]))
    entity_ids = frozenset(n for n in nodes if isinstance(n, str))
    literals = frozenset(n for n in nodes if isinstance(n, AttributeValue))
    if entity_ids and literals:
        raise MalformedResultError("result mixes entities and literals")
    if literals:
        return Literals(values=literals)
    return Entities(ids=entity_ids)
