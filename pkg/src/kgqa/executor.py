"""Closed-world evaluation of grounded PyLF expressions.

Two implementations share one contract: ``evaluate`` walks the graph through
its indexes, while ``brute_force_evaluate`` re-derives every node by linear
scans over the full entity and triple sets and exists purely as an oracle.
Keep them independent; never refactor shared set logic between them.

Negative joins quantify universally over the inner result: the answer keeps
every instance of the relation's answer-side class that has no edge to any
element of the inner set.  An empty inner set therefore yields the whole
class (vacuous quantification).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import KgqaError
from .kg import NUMERIC_TAGS, AttributeValue, KnowledgeGraph
from .pylf import And, Arg, Cmp, Count, EntityRef, Expr, Join, Mention, Start, Stop

DEFAULT_SIZE_CAP = 1_000_000


class EvalError(KgqaError):
    """The expression cannot be evaluated on this graph."""


class SizeCapExceeded(EvalError):
    """An intermediate result grew past the configured cap."""


class EvalTypeError(EvalError):
    """Set kinds clashed (entities vs literals vs count) during evaluation."""


@dataclass(frozen=True)
class Entities:
    ids: frozenset


@dataclass(frozen=True)
class Literals:
    values: frozenset


@dataclass(frozen=True)
class Number:
    value: int


AnswerSet = Union[Entities, Literals, Number]


def is_empty_answer(answer: AnswerSet) -> bool:
    """Empty means an empty entity or literal set; a count is never empty."""
    if isinstance(answer, Entities):
        return not answer.ids
    if isinstance(answer, Literals):
        return not answer.values
    return False


def answer_elements(answer: AnswerSet) -> frozenset:
    """The comparable element set of an answer (a count is a singleton)."""
    if isinstance(answer, Entities):
        return answer.ids
    if isinstance(answer, Literals):
        return answer.values
    return frozenset([answer.value])


def _comparable(value: AttributeValue, bound: AttributeValue) -> bool:
    if value.tag in NUMERIC_TAGS and bound.tag in NUMERIC_TAGS:
        return True
    return value.tag == "date" and bound.tag == "date"


def _holds(value: AttributeValue, op: str, bound: AttributeValue) -> bool:
    a, b = value.value, bound.value
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _group_key(value: AttributeValue, range_tag: str):
    """Ordering key for ARG, restricted to values matching the schema range."""
    if range_tag in NUMERIC_TAGS:
        if value.tag in NUMERIC_TAGS:
            return float(value.value)
        return None
    if range_tag == "date" and value.tag == "date":
        return value.value
    return None


def evaluate(expr: Expr, kg: KnowledgeGraph, size_cap: int = DEFAULT_SIZE_CAP) -> AnswerSet:
    """Evaluate a grounded expression; precondition: validate(expr, kg) == []."""

    def check_cap(elems, node_name):
        if len(elems) > size_cap:
            raise SizeCapExceeded(f"{node_name} inner set has {len(elems)} elements (cap {size_cap})")

    def schema(rel):
        if not rel.resolved:
            raise EvalError(f"unresolved relation {rel.name!r}")
        st = kg.schema_for(rel.name)
        if st is None:
            raise EvalError(f"relation {rel.name!r} has no schema triple")
        return st

    def ev(node) -> AnswerSet:
        if isinstance(node, Stop):
            return ev(node.inner)
        if isinstance(node, Start):
            leaf = node.leaf
            if isinstance(leaf, Mention):
                raise EvalError(f"ungrounded mention {leaf.surface!r}")
            if isinstance(leaf, EntityRef):
                return Entities(ids=frozenset([leaf.id]))
            return Literals(values=frozenset([leaf]))
        if isinstance(node, Join):
            inner = ev(node.inner)
            if isinstance(inner, Number):
                raise EvalTypeError("JOIN over a count")
            elems = answer_elements(inner)
            check_cap(elems, "JOIN")
            st = schema(node.rel)
            r = node.rel.name
            if not node.reversed:
                if not node.neg:
                    heads = set()
                    for t in elems:
                        for tr in kg.query_triples(r=r, t=t):
                            heads.add(tr.h)
                    return Entities(ids=frozenset(heads))
                universe = kg.instances_of(st.domain)
                kept = {
                    h
                    for h in universe
                    if all(not kg.query_triples(h=h, r=r, t=t) for t in elems)
                }
                return Entities(ids=frozenset(kept))
            if isinstance(inner, Literals):
                raise EvalTypeError("reversed JOIN inner must be an entity set")
            if not node.neg:
                tails = set()
                for h in elems:
                    for tr in kg.query_triples(h=h, r=r):
                        tails.add(tr.t)
                if st.range_is_datatype:
                    return Literals(values=frozenset(t for t in tails if isinstance(t, AttributeValue)))
                return Entities(ids=frozenset(t for t in tails if isinstance(t, str)))
            if st.range_is_datatype:
                raise EvalError(f"negated reversed JOIN over datatype range {st.range!r}")
            universe = kg.instances_of(st.range)
            kept = {
                t
                for t in universe
                if all(not kg.query_triples(h=h, r=r, t=t) for h in elems)
            }
            return Entities(ids=frozenset(kept))
        if isinstance(node, And):
            left = ev(node.left)
            right = ev(node.right)
            if isinstance(left, Entities) and isinstance(right, Entities):
                return Entities(ids=left.ids & right.ids)
            if isinstance(left, Literals) and isinstance(right, Literals):
                return Literals(values=left.values & right.values)
            raise EvalTypeError("AND over mismatched set kinds")
        if isinstance(node, Count):
            inner = ev(node.inner)
            if isinstance(inner, Number):
                raise EvalTypeError("COUNT over a count")
            return Number(value=len(answer_elements(inner)))
        if isinstance(node, Cmp):
            schema(node.rel)
            matched = set()
            for tr in kg.query_triples(r=node.rel.name):
                if isinstance(tr.t, AttributeValue) and _comparable(tr.t, node.bound):
                    if _holds(tr.t, node.op, node.bound):
                        matched.add(tr.h)
            return Entities(ids=frozenset(matched))
        if isinstance(node, Arg):
            inner = ev(node.inner)
            if not isinstance(inner, Entities):
                raise EvalTypeError("ARG inner must be an entity set")
            check_cap(inner.ids, "ARG")
            st = schema(node.rel)
            keyed = []
            for h in inner.ids:
                for tr in kg.query_triples(h=h, r=node.rel.name):
                    if isinstance(tr.t, AttributeValue):
                        key = _group_key(tr.t, st.range)
                        if key is not None:
                            keyed.append((h, key))
            if not keyed:
                return Entities(ids=frozenset())
            best = max(k for _, k in keyed) if node.mode == "argmax" else min(k for _, k in keyed)
            return Entities(ids=frozenset(h for h, k in keyed if k == best))
        raise EvalError(f"unknown node {node!r}")

    return ev(expr)


def brute_force_evaluate(
    expr: Expr, kg: KnowledgeGraph, size_cap: int = DEFAULT_SIZE_CAP
) -> AnswerSet:
    """Oracle evaluation by exhaustive scans only; intended for small graphs."""
    triples = list(kg.all_triples())
    entity_items = list(kg.entities.items())

    def members(class_id):
        return {eid for eid, rec in entity_items if class_id in rec.classes}

    def ev(node) -> AnswerSet:
        if isinstance(node, Stop):
            return ev(node.inner)
        if isinstance(node, Start):
            leaf = node.leaf
            if isinstance(leaf, Mention):
                raise EvalError(f"ungrounded mention {leaf.surface!r}")
            if isinstance(leaf, EntityRef):
                return Entities(ids=frozenset([leaf.id]))
            return Literals(values=frozenset([leaf]))
        if isinstance(node, Join):
            inner = ev(node.inner)
            if isinstance(inner, Number):
                raise EvalTypeError("JOIN over a count")
            elems = answer_elements(inner)
            if len(elems) > size_cap:
                raise SizeCapExceeded(f"JOIN inner set has {len(elems)} elements (cap {size_cap})")
            if not node.rel.resolved:
                raise EvalError(f"unresolved relation {node.rel.name!r}")
            st = kg.schema_for(node.rel.name)
            if st is None:
                raise EvalError(f"relation {node.rel.name!r} has no schema triple")
            r = node.rel.name
            if not node.reversed:
                if not node.neg:
                    found = set()
                    for tr in triples:
                        if tr.r == r and tr.t in elems:
                            found.add(tr.h)
                    return Entities(ids=frozenset(found))
                kept = set()
                for h in members(st.domain):
                    linked = {tr.t for tr in triples if tr.h == h and tr.r == r}
                    if not (linked & elems):
                        kept.add(h)
                return Entities(ids=frozenset(kept))
            if isinstance(inner, Literals):
                raise EvalTypeError("reversed JOIN inner must be an entity set")
            if not node.neg:
                found = set()
                for tr in triples:
                    if tr.r == r and tr.h in elems:
                        found.add(tr.t)
                if st.range_is_datatype:
                    return Literals(values=frozenset(t for t in found if isinstance(t, AttributeValue)))
                return Entities(ids=frozenset(t for t in found if isinstance(t, str)))
            if st.range_is_datatype:
                raise EvalError(f"negated reversed JOIN over datatype range {st.range!r}")
            kept = set()
            for t in members(st.range):
                linked = {tr.h for tr in triples if tr.r == r and tr.t == t}
                if not (linked & elems):
                    kept.add(t)
            return Entities(ids=frozenset(kept))
        if isinstance(node, And):
            left = ev(node.left)
            right = ev(node.right)
            if isinstance(left, Entities) and isinstance(right, Entities):
                return Entities(ids=left.ids & right.ids)
            if isinstance(left, Literals) and isinstance(right, Literals):
                return Literals(values=left.values & right.values)
            raise EvalTypeError("AND over mismatched set kinds")
        if isinstance(node, Count):
            inner = ev(node.inner)
            if isinstance(inner, Number):
                raise EvalTypeError("COUNT over a count")
            return Number(value=len(answer_elements(inner)))
        if isinstance(node, Cmp):
            if not node.rel.resolved:
                raise EvalError(f"unresolved relation {node.rel.name!r}")
            matched = set()
            for tr in triples:
                if tr.r != node.rel.name or not isinstance(tr.t, AttributeValue):
                    continue
                if _comparable(tr.t, node.bound) and _holds(tr.t, node.op, node.bound):
                    matched.add(tr.h)
            return Entities(ids=frozenset(matched))
        if isinstance(node, Arg):
            inner = ev(node.inner)
            if not isinstance(inner, Entities):
                raise EvalTypeError("ARG inner must be an entity set")
            if len(inner.ids) > size_cap:
                raise SizeCapExceeded(f"ARG inner set has {len(inner.ids)} elements (cap {size_cap})")
            if not node.rel.resolved:
                raise EvalError(f"unresolved relation {node.rel.name!r}")
            st = kg.schema_for(node.rel.name)
            if st is None:
                raise EvalError(f"relation {node.rel.name!r} has no schema triple")
            keyed = []
            for tr in triples:
                if tr.r == node.rel.name and tr.h in inner.ids and isinstance(tr.t, AttributeValue):
                    key = _group_key(tr.t, st.range)
                    if key is not None:
                        keyed.append((tr.h, key))
            if not keyed:
                return Entities(ids=frozenset())
            best = max(k for _, k in keyed) if node.mode == "argmax" else min(k for _, k in keyed)
            return Entities(ids=frozenset(h for h, k in keyed if k == best))
        raise EvalError(f"unknown node {node!r}")

    return ev(expr)
