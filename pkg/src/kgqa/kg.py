"""In-memory knowledge graph with schema annotations and closed-world lookups.

A graph is loaded from three TSV files (entities, instance triples, schema
triples) and is immutable afterwards.  Lookups are index backed; indexes are
private and built once in the constructor, so a graph can be shared freely
across threads.

File formats (UTF-8, tab separated, one record per line):

    entities.tsv   entity_id <TAB> surface_name <TAB> class1,class2,...
    triples.tsv    h <TAB> r <TAB> t     (attribute t encoded "lexical"^^tag)
    schema.tsv     domain_class <TAB> relation <TAB> range_class_or_tag

Attribute tags are ``integer``, ``float``, ``string``, ``date``.  Dates are
kept as ISO-8601 strings and compared lexically; floats accept scientific
notation such as ``2.32e+03``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .errors import DataError

log = logging.getLogger(__name__)

EntityId = str
RelationId = str
ClassId = str

ATTRIBUTE_TAGS = ("integer", "float", "string", "date")
NUMERIC_TAGS = ("integer", "float")
# Tags usable as CMP bounds / ARG keys: numbers compare numerically, dates
# compare lexically on their ISO form.  Strings are not comparable.
COMPARABLE_TAGS = ("integer", "float", "date")

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_TYPED_LITERAL_RE = re.compile(r'^"(?P<lex>.*)"\^\^(?P<tag>[a-z]+)$', re.S)


class KGLoadError(DataError):
    """A KG file could not be loaded; carries file and line context."""

    def __init__(self, path: Union[str, Path], line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class AttributeValue:
    """A typed literal: one of integer, float, string, or date."""

    tag: str
    value: Union[int, float, str]

    def __post_init__(self):
        if self.tag == "integer":
            ok = isinstance(self.value, int) and not isinstance(self.value, bool)
        elif self.tag == "float":
            ok = isinstance(self.value, float) and math.isfinite(self.value)
        elif self.tag == "string":
            ok = isinstance(self.value, str)
        elif self.tag == "date":
            ok = isinstance(self.value, str) and bool(_DATE_RE.match(self.value))
        else:
            raise ValueError(f"unknown attribute tag {self.tag!r}")
        if not ok:
            raise ValueError(f"value {self.value!r} is not a valid {self.tag}")

    @classmethod
    def from_lexical(cls, lexical: str, tag: str) -> "AttributeValue":
        """Parse the TSV lexical form of a literal with an explicit tag."""
        if tag == "integer":
            if not _INT_RE.match(lexical.strip()):
                raise ValueError(f"not an integer: {lexical!r}")
            return cls("integer", int(lexical))
        if tag == "float":
            value = float(lexical)
            if not math.isfinite(value):
                raise ValueError(f"non-finite float: {lexical!r}")
            return cls("float", value)
        if tag == "string":
            return cls("string", lexical)
        if tag == "date":
            return cls("date", lexical.strip())
        raise ValueError(f"unknown attribute tag {tag!r}")

    @classmethod
    def detect(cls, text: str) -> Optional["AttributeValue"]:
        """Literal detection: integer, float, or ISO date; None otherwise."""
        text = text.strip()
        if _INT_RE.match(text):
            return cls("integer", int(text))
        if _FLOAT_RE.match(text):
            return cls("float", float(text))
        if _DATE_RE.match(text):
            return cls("date", text)
        return None

    def lexical(self) -> str:
        """Canonical lexical form (round-trips through from_lexical)."""
        if self.tag == "integer":
            return str(self.value)
        if self.tag == "float":
            return repr(self.value)
        return str(self.value)


Node = Union[EntityId, AttributeValue]


@dataclass(frozen=True)
class Triple:
    h: EntityId
    r: RelationId
    t: Node


@dataclass(frozen=True)
class SchemaTriple:
    """(domain class, relation, range class-or-datatype-tag)."""

    domain: ClassId
    r: RelationId
    range: str

    @property
    def range_is_datatype(self) -> bool:
        return self.range in ATTRIBUTE_TAGS


@dataclass(frozen=True)
class EntityRecord:
    name: str
    classes: frozenset


class KnowledgeGraph:
    """Immutable, schema-annotated triple store under closed-world semantics.

    Relations are schema-unique: at most one SchemaTriple per relation.
    Schema-consistency violations found at construction are recorded (and
    logged) but do not reject the graph; ``schema_consistent`` reports the
    outcome.
    """

    def __init__(
        self,
        entities: Mapping[EntityId, EntityRecord],
        triples: Iterable[Triple],
        schema: Iterable[SchemaTriple],
    ):
        self._entities = dict(entities)
        self._triples = frozenset(triples)
        self._schema: dict = {}
        for st in schema:
            if st.r in self._schema and self._schema[st.r] != st:
                raise DataError(f"duplicate schema triple for relation {st.r!r}")
            self._schema[st.r] = st

        for tr in self._triples:
            if tr.h not in self._entities:
                raise DataError(f"triple head {tr.h!r} is not a declared entity")
            if isinstance(tr.t, str) and tr.t not in self._entities:
                raise DataError(f"triple tail {tr.t!r} is not a declared entity")

        by_class: dict = {}
        for eid, rec in self._entities.items():
            for c in rec.classes:
                by_class.setdefault(c, set()).add(eid)
        self._by_class = {c: frozenset(s) for c, s in by_class.items()}

        self._by_hr: dict = {}
        self._by_rt: dict = {}
        self._by_h: dict = {}
        self._by_r: dict = {}
        self._by_t: dict = {}
        for tr in self._triples:
            self._by_hr.setdefault((tr.h, tr.r), set()).add(tr)
            self._by_rt.setdefault((tr.r, tr.t), set()).add(tr)
            self._by_h.setdefault(tr.h, set()).add(tr)
            self._by_r.setdefault(tr.r, set()).add(tr)
            self._by_t.setdefault(tr.t, set()).add(tr)

        self._schema_by_domain: dict = {}
        self._schema_by_range: dict = {}
        for st in self._schema.values():
            self._schema_by_domain.setdefault(st.domain, set()).add(st)
            self._schema_by_range.setdefault(st.range, set()).add(st)

        self._violations = tuple(self._check_consistency())
        for v in self._violations:
            log.warning("schema violation: %s", v)

    def _check_consistency(self):
        for tr in sorted(self._triples, key=lambda x: (x.h, x.r, str(x.t))):
            st = self._schema.get(tr.r)
            if st is None:
                yield f"relation {tr.r!r} has no schema triple"
                continue
            if st.domain not in self._entities[tr.h].classes:
                yield f"head {tr.h!r} of {tr.r!r} is not an instance of {st.domain!r}"
            if isinstance(tr.t, AttributeValue):
                if not st.range_is_datatype:
                    yield f"literal tail on {tr.r!r} but schema range is class {st.range!r}"
                elif tr.t.tag != st.range:
                    yield f"tail tag {tr.t.tag!r} on {tr.r!r} does not match range {st.range!r}"
            else:
                if st.range_is_datatype:
                    yield f"entity tail {tr.t!r} on {tr.r!r} but schema range is datatype {st.range!r}"
                elif st.range not in self._entities[tr.t].classes:
                    yield f"tail {tr.t!r} of {tr.r!r} is not an instance of {st.range!r}"

    # -- basic accessors ---------------------------------------------------

    @property
    def entities(self) -> Mapping[EntityId, EntityRecord]:
        return MappingProxyType(self._entities)

    @property
    def schema(self) -> Mapping[RelationId, SchemaTriple]:
        return MappingProxyType(self._schema)

    @property
    def schema_violations(self) -> tuple:
        return self._violations

    @property
    def schema_consistent(self) -> bool:
        return not self._violations

    def has_entity(self, eid: EntityId) -> bool:
        return eid in self._entities

    def surface_name(self, eid: EntityId) -> str:
        return self._entities[eid].name

    def classes_of(self, eid: EntityId) -> frozenset:
        return self._entities[eid].classes

    def declared_classes(self) -> frozenset:
        return frozenset(self._by_class)

    def relations(self) -> frozenset:
        return frozenset(self._schema) | {tr.r for tr in self._triples}

    def all_triples(self) -> frozenset:
        return self._triples

    def schema_for(self, r: RelationId) -> Optional[SchemaTriple]:
        return self._schema.get(r)

    # -- query operations ---------------------------------------------------

    def instances_of(self, c: ClassId) -> frozenset:
        """All entities whose class set contains c; empty for unknown c."""
        return self._by_class.get(c, frozenset())

    def query_triples(
        self,
        h: Optional[EntityId] = None,
        r: Optional[RelationId] = None,
        t: Optional[Node] = None,
    ) -> set:
        """Triples matching every bound argument; at least one must be bound."""
        if h is None and r is None and t is None:
            raise ValueError("query_triples requires at least one bound argument")
        if h is not None and r is not None:
            found = self._by_hr.get((h, r), set())
        elif r is not None and t is not None:
            found = self._by_rt.get((r, t), set())
        elif h is not None:
            found = self._by_h.get(h, set())
        elif r is not None:
            found = self._by_r.get(r, set())
        else:
            found = self._by_t.get(t, set())
        out = set()
        for tr in found:
            if h is not None and tr.h != h:
                continue
            if r is not None and tr.r != r:
                continue
            if t is not None and tr.t != t:
                continue
            out.add(tr)
        return out

    def schema_lookup(self, classes: Iterable[str], side: str) -> set:
        """Schema triples whose domain (or range) is in the given set.

        For the range side the set may also contain datatype tags.
        """
        if side not in ("domain", "range"):
            raise ValueError(f"side must be 'domain' or 'range', got {side!r}")
        index = self._schema_by_domain if side == "domain" else self._schema_by_range
        out: set = set()
        for c in classes:
            out |= index.get(c, set())
        return out

    # -- equality -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (
            self._entities == other._entities
            and self._triples == other._triples
            and self._schema == other._schema
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"KnowledgeGraph(entities={len(self._entities)}, "
            f"triples={len(self._triples)}, schema={len(self._schema)})"
        )


def _read_tsv(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            yield line_no, line.split("\t")


def load_kg(entities_path, triples_path, schema_path) -> KnowledgeGraph:
    """Load and fully index a graph from the three TSV files.

    Referential-integrity problems (unknown entities, duplicate schema,
    malformed lines) are hard errors; schema-consistency violations are
    reported as warnings on the returned graph.
    """
    entities: dict = {}
    for line_no, cols in _read_tsv(entities_path):
        if len(cols) != 3:
            raise KGLoadError(entities_path, line_no, f"expected 3 columns, got {len(cols)}")
        eid, name, class_list = cols
        if not eid:
            raise KGLoadError(entities_path, line_no, "empty entity id")
        if eid in entities:
            raise KGLoadError(entities_path, line_no, f"duplicate entity id {eid!r}")
        classes = frozenset(c.strip() for c in class_list.split(",") if c.strip())
        entities[eid] = EntityRecord(name=name, classes=classes)

    declared = set()
    for rec in entities.values():
        declared |= rec.classes

    schema: list = []
    seen_relations: set = set()
    for line_no, cols in _read_tsv(schema_path):
        if len(cols) != 3:
            raise KGLoadError(schema_path, line_no, f"expected 3 columns, got {len(cols)}")
        domain, rel, rng = cols
        if rel in seen_relations:
            raise KGLoadError(schema_path, line_no, f"duplicate schema triple for relation {rel!r}")
        seen_relations.add(rel)
        if domain not in declared:
            raise KGLoadError(schema_path, line_no, f"unknown class {domain!r} in schema")
        if rng not in ATTRIBUTE_TAGS and rng not in declared:
            raise KGLoadError(schema_path, line_no, f"unknown class {rng!r} in schema")
        schema.append(SchemaTriple(domain=domain, r=rel, range=rng))

    triples: list = []
    for line_no, cols in _read_tsv(triples_path):
        if len(cols) != 3:
            raise KGLoadError(triples_path, line_no, f"expected 3 columns, got {len(cols)}")
        h, r, t_raw = cols
        if h not in entities:
            raise KGLoadError(triples_path, line_no, f"unknown entity {h!r}")
        m = _TYPED_LITERAL_RE.match(t_raw)
        if m:
            try:
                t: Node = AttributeValue.from_lexical(m.group("lex"), m.group("tag"))
            except ValueError as exc:
                raise KGLoadError(triples_path, line_no, str(exc)) from exc
        else:
            if t_raw not in entities:
                raise KGLoadError(triples_path, line_no, f"unknown entity {t_raw!r}")
            t = t_raw
        triples.append(Triple(h=h, r=r, t=t))

    return KnowledgeGraph(entities=entities, triples=triples, schema=schema)
