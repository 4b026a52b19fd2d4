"""Schema-guided semantic matching: resolve draft mentions to KG ids.

``ground`` works bottom-up over the logical tree.  START leaves either parse
as typed literals or retrieve top-j entity candidates (with their classes)
from the similarity index.  At each JOIN/CMP/ARG node, schema triples
reachable from the child's candidate classes are fetched, the node's relation
mention is scored against each schema relation name, relations above the
similarity threshold are kept, and child candidates are pruned to classes
that appear in some kept schema triple.  Surviving choices are enumerated
into fully grounded forms, scored by the product of leaf and relation
similarities, so every emitted candidate is schema-valid by construction.

``brute_force_ground`` is the unguided baseline: the cartesian product of
top-Ke entities per mention and top-Kr relations per slot, with no schema
pruning and no validity guarantee.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .embedding import EmbeddingProvider, SimilarityIndex
from .errors import KgqaError
from .kg import COMPARABLE_TAGS, NUMERIC_TAGS, AttributeValue, KnowledgeGraph
from .pylf import (
    And,
    Arg,
    Cmp,
    Count,
    EntityRef,
    Expr,
    Join,
    Mention,
    RelationRef,
    Start,
    Stop,
    print_pylf,
    validate,
)

log = logging.getLogger(__name__)


class MatchError(KgqaError):
    """Grounding failed; carries the offending mention."""

    def __init__(self, message: str, mention: str = ""):
        super().__init__(message)
        self.mention = mention


class NoEntityCandidates(MatchError):
    pass


class NoRelationAboveTheta(MatchError):
    pass


@dataclass(frozen=True)
class MatcherConfig:
    """j entity candidates per mention, relation threshold theta, output cap.

    theta is a cosine threshold, so values above 1 exclude every relation;
    they are accepted (and simply never match) rather than rejected.
    """

    j: int = 10
    theta: float = 0.7
    max_candidates: int = 200

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("j must be at least 1")
        if self.theta < 0.0:
            raise ValueError("theta must be non-negative")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")


@dataclass(frozen=True)
class EntityCandidate:
    entity_id: str
    similarity: float
    classes: frozenset


@dataclass(frozen=True)
class GroundedLogicalForm:
    expr: Expr
    score: float


def build_index(kg: KnowledgeGraph, embedder: EmbeddingProvider) -> SimilarityIndex:
    """Embed every entity surface name and relation name into one index."""
    entity_ids = sorted(kg.entities)
    names = [kg.surface_name(eid) for eid in entity_ids]
    classes = [kg.classes_of(eid) for eid in entity_ids]
    relation_ids = sorted(kg.relations())

    unique = sorted(set(names) | set(relation_ids))
    vectors = embedder.embed_many(unique)
    by_text = {text: vectors[i] for i, text in enumerate(unique)}

    entity_vectors = (
        np.stack([by_text[n] for n in names]) if names else np.zeros((0, embedder.dimension))
    )
    relation_vectors = (
        np.stack([by_text[r] for r in relation_ids])
        if relation_ids
        else np.zeros((0, embedder.dimension))
    )
    return SimilarityIndex(
        entity_ids=entity_ids,
        entity_names=names,
        entity_classes=classes,
        entity_vectors=entity_vectors,
        relation_ids=relation_ids,
        relation_vectors=relation_vectors,
        embedder=embedder,
    )


def candidate_entities(mention: str, index: SimilarityIndex, j: int) -> List[EntityCandidate]:
    """Top-j entities by cosine, each carrying its candidate classes."""
    out = []
    for eid, sim in index.entity_top_k(mention, j):
        out.append(EntityCandidate(entity_id=eid, similarity=sim, classes=index.classes_of(eid)))
    return out


# A partially grounded subtree: its expression, accumulated score, and the
# output type as either a candidate class set or a datatype tag.
@dataclass(frozen=True)
class _Partial:
    expr: Expr
    score: float
    classes: Optional[frozenset] = None
    tag: Optional[str] = None

    @property
    def is_entity(self) -> bool:
        return self.classes is not None


def _bound_tags(bound: AttributeValue) -> frozenset:
    if bound.tag in NUMERIC_TAGS:
        return frozenset(NUMERIC_TAGS)
    if bound.tag == "date":
        return frozenset(["date"])
    return frozenset()


class _Grounder:
    def __init__(self, kg: KnowledgeGraph, index: SimilarityIndex, cfg: MatcherConfig):
        self.kg = kg
        self.index = index
        self.cfg = cfg

    def ground(self, node: Expr) -> List[_Partial]:
        if isinstance(node, Stop):
            return [
                _Partial(Stop(inner=p.expr), p.score, p.classes, p.tag)
                for p in self.ground(node.inner)
            ]
        if isinstance(node, Count):
            return [
                _Partial(Count(inner=p.expr), p.score, p.classes, p.tag)
                for p in self.ground(node.inner)
            ]
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
        raise MatchError(f"cannot ground node {type(node).__name__}")

    def _start(self, node: Start) -> List[_Partial]:
        leaf = node.leaf
        if isinstance(leaf, AttributeValue):
            return [_Partial(node, 1.0, tag=leaf.tag)]
        if isinstance(leaf, EntityRef):
            if not self.kg.has_entity(leaf.id):
                raise NoEntityCandidates(f"unknown entity id {leaf.id!r}", mention=leaf.id)
            return [_Partial(node, 1.0, classes=self.kg.classes_of(leaf.id))]
        literal = AttributeValue.detect(leaf.surface)
        if literal is not None:
            return [_Partial(Start(leaf=literal), 1.0, tag=literal.tag)]
        candidates = [
            c for c in candidate_entities(leaf.surface, self.index, self.cfg.j)
            if c.similarity > 0.0
        ]
        if not candidates:
            raise NoEntityCandidates(
                f"no entity candidate for mention {leaf.surface!r}", mention=leaf.surface
            )
        return [
            _Partial(Start(leaf=EntityRef(id=c.entity_id)), c.similarity, classes=c.classes)
            for c in candidates
        ]

    def _kept_relations(self, mention: str, schema_triples) -> list:
        """Schema relations scoring above theta against the mention."""
        if not schema_triples:
            return []
        sims = self.index.relation_similarities(mention)
        kept = [
            (st, sims.get(st.r, 0.0))
            for st in schema_triples
            if sims.get(st.r, 0.0) > self.cfg.theta
        ]
        kept.sort(key=lambda pair: (-pair[1], pair[0].r))
        return kept

    def _join(self, node: Join) -> List[_Partial]:
        inner = self.ground(node.inner)
        mention = node.rel.name
        child_side = "domain" if node.reversed else "range"
        keys = set()
        for p in inner:
            if p.is_entity:
                keys |= p.classes
            elif not node.reversed:
                keys.add(p.tag)
        schema_triples = self.kg.schema_lookup(keys, child_side)
        if node.neg and node.reversed:
            schema_triples = {st for st in schema_triples if not st.range_is_datatype}
        kept = self._kept_relations(mention, schema_triples)
        if not kept:
            raise NoRelationAboveTheta(
                f"no relation above theta for mention {mention!r}", mention=mention
            )
        out = []
        for st, rel_sim in kept:
            child_class = st.domain if node.reversed else st.range
            for p in inner:
                if p.is_entity:
                    if child_class not in p.classes:
                        continue
                elif node.reversed or p.tag != child_class:
                    continue
                expr = Join(
                    rel=RelationRef(name=st.r, resolved=True),
                    inner=p.expr,
                    reversed=node.reversed,
                    neg=node.neg,
                )
                if node.reversed:
                    if st.range_is_datatype:
                        out.append(_Partial(expr, rel_sim * p.score, tag=st.range))
                    else:
                        out.append(_Partial(expr, rel_sim * p.score, classes=frozenset([st.range])))
                else:
                    out.append(_Partial(expr, rel_sim * p.score, classes=frozenset([st.domain])))
        if not out:
            raise MatchError(
                f"no schema-compatible grounding at relation {mention!r}", mention=mention
            )
        return out

    def _and(self, node: And) -> List[_Partial]:
        lefts = self.ground(node.left)
        rights = self.ground(node.right)
        out = []
        for lp, rp in itertools.product(lefts, rights):
            if lp.is_entity and rp.is_entity:
                common = lp.classes & rp.classes
                if not common:
                    continue
                out.append(_Partial(And(left=lp.expr, right=rp.expr), lp.score * rp.score, classes=common))
            elif not lp.is_entity and not rp.is_entity and lp.tag == rp.tag:
                out.append(_Partial(And(left=lp.expr, right=rp.expr), lp.score * rp.score, tag=lp.tag))
        if not out:
            raise MatchError("no type-compatible AND combination")
        return out

    def _cmp(self, node: Cmp) -> List[_Partial]:
        mention = node.rel.name
        tags = _bound_tags(node.bound)
        if not tags:
            raise MatchError(
                f"CMP bound {node.bound.value!r} is not comparable", mention=mention
            )
        schema_triples = self.kg.schema_lookup(tags, "range")
        kept = self._kept_relations(mention, schema_triples)
        if not kept:
            raise NoRelationAboveTheta(
                f"no relation above theta for mention {mention!r}", mention=mention
            )
        return [
            _Partial(
                Cmp(op=node.op, rel=RelationRef(name=st.r, resolved=True), bound=node.bound),
                sim,
                classes=frozenset([st.domain]),
            )
            for st, sim in kept
        ]

    def _arg(self, node: Arg) -> List[_Partial]:
        inner = self.ground(node.inner)
        mention = node.rel.name
        keys = set()
        for p in inner:
            if p.is_entity:
                keys |= p.classes
        schema_triples = {
            st
            for st in self.kg.schema_lookup(keys, "domain")
            if st.range_is_datatype and st.range in COMPARABLE_TAGS
        }
        kept = self._kept_relations(mention, schema_triples)
        if not kept:
            raise NoRelationAboveTheta(
                f"no relation above theta for mention {mention!r}", mention=mention
            )
        out = []
        for st, rel_sim in kept:
            for p in inner:
                if not p.is_entity or st.domain not in p.classes:
                    continue
                expr = Arg(mode=node.mode, inner=p.expr, rel=RelationRef(name=st.r, resolved=True))
                out.append(_Partial(expr, rel_sim * p.score, classes=frozenset([st.domain])))
        if not out:
            raise MatchError(
                f"no schema-compatible grounding at relation {mention!r}", mention=mention
            )
        return out


def _ranked(partials: Sequence[_Partial], cap: int) -> List[GroundedLogicalForm]:
    best: dict = {}
    for p in partials:
        text = print_pylf(p.expr)
        if text not in best or p.score > best[text][1]:
            best[text] = (p.expr, p.score)
    ordered = sorted(best.items(), key=lambda kv: (-kv[1][1], kv[0]))
    return [GroundedLogicalForm(expr=expr, score=score) for _, (expr, score) in ordered[:cap]]


def ground(
    draft: Expr, kg: KnowledgeGraph, index: SimilarityIndex, cfg: MatcherConfig
) -> List[GroundedLogicalForm]:
    """Enumerate schema-valid groundings of a draft, best first.

    Raises a MatchError subclass when some mention has no entity candidate or
    no relation clears theta; the pipeline treats both as empty-candidate
    conditions.
    """
    partials = _Grounder(kg, index, cfg).ground(draft)
    candidates = _ranked(partials, cfg.max_candidates)
    valid = []
    for c in candidates:
        issues = validate(c.expr, kg)
        if issues:
            log.warning("dropping schema-invalid grounding %s: %s",
                        print_pylf(c.expr), issues[0].message)
            continue
        valid.append(c)
    return valid


# ---------------------------------------------------------------------------
# Unguided baseline
# ---------------------------------------------------------------------------


@dataclass
class _Slots:
    mentions: list = field(default_factory=list)
    relations: list = field(default_factory=list)


def _collect_slots(node: Expr, slots: _Slots) -> None:
    if isinstance(node, (Stop, Count)):
        _collect_slots(node.inner, slots)
    elif isinstance(node, Start):
        if isinstance(node.leaf, Mention) and AttributeValue.detect(node.leaf.surface) is None:
            slots.mentions.append(node.leaf.surface)
    elif isinstance(node, Join):
        slots.relations.append(node.rel.name)
        _collect_slots(node.inner, slots)
    elif isinstance(node, And):
        _collect_slots(node.left, slots)
        _collect_slots(node.right, slots)
    elif isinstance(node, Arg):
        slots.relations.append(node.rel.name)
        _collect_slots(node.inner, slots)
    elif isinstance(node, Cmp):
        slots.relations.append(node.rel.name)


def _substitute(node: Expr, mentions, relations, m_iter, r_iter) -> Expr:
    if isinstance(node, Stop):
        return Stop(inner=_substitute(node.inner, mentions, relations, m_iter, r_iter))
    if isinstance(node, Count):
        return Count(inner=_substitute(node.inner, mentions, relations, m_iter, r_iter))
    if isinstance(node, Start):
        if isinstance(node.leaf, Mention):
            literal = AttributeValue.detect(node.leaf.surface)
            if literal is not None:
                return Start(leaf=literal)
            eid = mentions[next(m_iter)]
            return Start(leaf=EntityRef(id=eid))
        return node
    if isinstance(node, Join):
        rid = relations[next(r_iter)]
        return Join(
            rel=RelationRef(name=rid, resolved=True),
            inner=_substitute(node.inner, mentions, relations, m_iter, r_iter),
            reversed=node.reversed,
            neg=node.neg,
        )
    if isinstance(node, And):
        return And(
            left=_substitute(node.left, mentions, relations, m_iter, r_iter),
            right=_substitute(node.right, mentions, relations, m_iter, r_iter),
        )
    if isinstance(node, Arg):
        rid = relations[next(r_iter)]
        return Arg(
            mode=node.mode,
            inner=_substitute(node.inner, mentions, relations, m_iter, r_iter),
            rel=RelationRef(name=rid, resolved=True),
        )
    if isinstance(node, Cmp):
        rid = relations[next(r_iter)]
        return Cmp(op=node.op, rel=RelationRef(name=rid, resolved=True), bound=node.bound)
    raise MatchError(f"cannot ground node {type(node).__name__}")


def brute_force_ground(
    draft: Expr,
    index: SimilarityIndex,
    ke: int,
    kr: int,
    cap: int = 1_000_000,
) -> List[GroundedLogicalForm]:
    """Cartesian product of top-Ke entities and top-Kr relations per slot.

    No schema pruning and no validity guarantee; candidate count is
    Ke^(number of mentions) * Kr^(number of relation slots).
    """
    slots = _Slots()
    _collect_slots(draft, slots)
    mention_choices = [index.entity_top_k(m, ke) for m in slots.mentions]
    relation_choices = [index.relation_top_k(r, kr) for r in slots.relations]

    total = 1
    for choices in itertools.chain(mention_choices, relation_choices):
        total *= max(len(choices), 1)
    if total > cap:
        raise MatchError(f"enumeration of {total} candidates exceeds cap {cap}")

    out = []
    for m_combo in itertools.product(*mention_choices) if mention_choices else [()]:
        for r_combo in itertools.product(*relation_choices) if relation_choices else [()]:
            mentions = [eid for eid, _ in m_combo]
            relations = [rid for rid, _ in r_combo]
            score = 1.0
            for _, sim in itertools.chain(m_combo, r_combo):
                score *= sim
            expr = _substitute(draft, mentions, relations, iter(range(len(mentions))), iter(range(len(relations))))
            out.append(GroundedLogicalForm(expr=expr, score=score))
    out.sort(key=lambda g: (-g.score, print_pylf(g.expr)))
    return out
