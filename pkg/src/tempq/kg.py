"""Immutable in-memory knowledge graph with qualifier-bearing statements.

Facts are subject-predicate-object statements that may carry qualifier
pairs (statement-level annotations such as a start time or the ceremony an
award was handed out at).  Predicates carry schema flags declaring their
temporal, part-of, sequence or ordinal role.  The graph is frozen after
load: every read operation is safe for unlimited concurrent readers and no
mutation API exists.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .temporal import Interval, TimeValue, parse_time_value


class GraphError(ValueError):
    """The graph document violates a structural invariant."""


class SchemaFlag(enum.Enum):
    TEMPORAL_POINT = "TEMPORAL_POINT"
    TEMPORAL_START = "TEMPORAL_START"
    TEMPORAL_END = "TEMPORAL_END"
    PART_OF = "PART_OF"
    PRECEDES = "PRECEDES"
    SUCCEEDS = "SUCCEEDS"
    ORDINAL_ATTRIBUTE = "ORDINAL_ATTRIBUTE"


class LiteralKind(enum.Enum):
    TIME = "TIME"
    INTEGER = "INTEGER"
    STRING = "STRING"


@dataclass(frozen=True)
class Literal:
    kind: LiteralKind
    value: object  # TimeValue | int | str

    def render(self) -> str:
        if self.kind is LiteralKind.TIME:
            return self.value.render()
        return str(self.value)

    @staticmethod
    def time(text: str) -> "Literal":
        return Literal(LiteralKind.TIME, parse_time_value(text))

    @staticmethod
    def integer(n: int) -> "Literal":
        return Literal(LiteralKind.INTEGER, int(n))

    @staticmethod
    def string(s: str) -> "Literal":
        return Literal(LiteralKind.STRING, s)


@dataclass(frozen=True)
class Entity:
    id: str
    label: str
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class Predicate:
    id: str
    label: str
    flags: frozenset[SchemaFlag] = frozenset()


# Statement objects and qualifier values are either an entity id (str) or a
# Literal; isinstance(x, Literal) distinguishes the two.
@dataclass(frozen=True)
class Statement:
    subject: str
    predicate: str
    object: object
    qualifiers: tuple[tuple[str, object], ...] = ()


@dataclass(frozen=True)
class StatementTime:
    """The temporal annotation of one statement.

    Either a point value, or a start/end pair spanning the statement's
    validity.  ``projected`` is the single value shown when the time itself
    is the queried answer.
    """

    point: TimeValue | None = None
    start: TimeValue | None = None
    end: TimeValue | None = None

    @property
    def interval(self) -> Interval:
        if self.point is not None:
            return self.point.interval
        if self.start is not None and self.end is not None:
            if not self.start.start < self.end.end:
                raise GraphError(
                    f"statement time starts {self.start.render()} after end {self.end.render()}"
                )
            return Interval(self.start.start, self.end.end)
        only = self.start or self.end
        return only.interval

    @property
    def projected(self) -> TimeValue:
        return self.point or self.start or self.end


@dataclass
class KnowledgeGraph:
    entities: dict[str, Entity]
    predicates: dict[str, Predicate]
    statements: tuple[Statement, ...]
    _by_subject: dict[str, tuple[int, ...]] = field(default_factory=dict, repr=False)
    _by_object: dict[str, tuple[int, ...]] = field(default_factory=dict, repr=False)
    _by_predicate: dict[str, tuple[int, ...]] = field(default_factory=dict, repr=False)
    _by_qualifier_value: dict[str, tuple[int, ...]] = field(default_factory=dict, repr=False)
    _alias_pattern: "re.Pattern | None" = field(default=None, repr=False)
    _alias_to_entity: dict[str, str] = field(default_factory=dict, repr=False)

    def label(self, node_id: str) -> str:
        if node_id in self.entities:
            return self.entities[node_id].label
        if node_id in self.predicates:
            return self.predicates[node_id].label
        return node_id

    def flags(self, predicate_id: str) -> frozenset[SchemaFlag]:
        pred = self.predicates.get(predicate_id)
        return pred.flags if pred else frozenset()

    def statements_by_subject(self, entity_id: str) -> list[Statement]:
        return [self.statements[i] for i in self._by_subject.get(entity_id, ())]

    def statements_by_object(self, entity_id: str) -> list[Statement]:
        return [self.statements[i] for i in self._by_object.get(entity_id, ())]

    def statements_by_predicate(self, predicate_id: str) -> list[Statement]:
        return [self.statements[i] for i in self._by_predicate.get(predicate_id, ())]

    def statements_by_qualifier_value(self, entity_id: str) -> list[Statement]:
        return [self.statements[i] for i in self._by_qualifier_value.get(entity_id, ())]


_TEMPORAL_QUALIFIER_FLAGS = (
    SchemaFlag.TEMPORAL_POINT,
    SchemaFlag.TEMPORAL_START,
    SchemaFlag.TEMPORAL_END,
)


def _value_from_json(obj: dict, where: str) -> object:
    keys = [k for k in ("entity", "time", "int", "string") if k in obj]
    if len(keys) != 1:
        raise GraphError(f"{where}: value must have exactly one of entity/time/int/string")
    key = keys[0]
    if key == "entity":
        return obj["entity"]
    if key == "time":
        return Literal.time(obj["time"])
    if key == "int":
        return Literal.integer(obj["int"])
    return Literal.string(obj["string"])


def _value_to_json(value: object) -> dict:
    if isinstance(value, Literal):
        if value.kind is LiteralKind.TIME:
            return {"time": value.value.render()}
        if value.kind is LiteralKind.INTEGER:
            return {"int": value.value}
        return {"string": value.value}
    return {"entity": value}


def load_graph(source) -> KnowledgeGraph:
    """Load a graph from a JSON document, mapping, or file path.

    Establishes all structural invariants: unique ids, no dangling entity
    or predicate references, at most one qualifier per temporal role.
    Loading is deterministic; statement order is the document order.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source

    entities: dict[str, Entity] = {}
    for item in doc.get("entities", []):
        if item["id"] in entities:
            raise GraphError(f"duplicate entity id: {item['id']}")
        if not item.get("label"):
            raise GraphError(f"entity {item['id']} has an empty label")
        entities[item["id"]] = Entity(
            id=item["id"], label=item["label"], aliases=tuple(item.get("aliases", []))
        )

    predicates: dict[str, Predicate] = {}
    for item in doc.get("predicates", []):
        if item["id"] in predicates:
            raise GraphError(f"duplicate predicate id: {item['id']}")
        flags = frozenset(SchemaFlag(f) for f in item.get("flags", []))
        if SchemaFlag.PRECEDES in flags and SchemaFlag.SUCCEEDS in flags:
            raise GraphError(f"predicate {item['id']} flagged both PRECEDES and SUCCEEDS")
        predicates[item["id"]] = Predicate(id=item["id"], label=item["label"], flags=flags)

    statements = []
    for i, item in enumerate(doc.get("statements", [])):
        where = f"statement #{i}"
        subject = item["subject"]
        if subject not in entities:
            raise GraphError(f"{where}: unknown subject entity {subject!r}")
        predicate = item["predicate"]
        if predicate not in predicates:
            raise GraphError(f"{where}: unknown predicate {predicate!r}")
        obj = _value_from_json(item["object"], where)
        if isinstance(obj, str) and obj not in entities:
            raise GraphError(f"{where}: unknown object entity {obj!r}")
        qualifiers = []
        roles_seen = set()
        for q in item.get("qualifiers", []):
            qpred = q["predicate"]
            if qpred not in predicates:
                raise GraphError(f"{where}: unknown qualifier predicate {qpred!r}")
            qval = _value_from_json(q, where)
            if isinstance(qval, str) and qval not in entities:
                raise GraphError(f"{where}: unknown qualifier entity {qval!r}")
            for flag in _TEMPORAL_QUALIFIER_FLAGS:
                if flag in predicates[qpred].flags:
                    if flag in roles_seen:
                        raise GraphError(f"{where}: duplicate temporal qualifier role {flag.value}")
                    roles_seen.add(flag)
            qualifiers.append((qpred, qval))
        statements.append(
            Statement(subject=subject, predicate=predicate, object=obj, qualifiers=tuple(qualifiers))
        )

    graph = KnowledgeGraph(entities=entities, predicates=predicates, statements=tuple(statements))
    _build_indexes(graph)
    return graph


def _build_indexes(graph: KnowledgeGraph) -> None:
    by_subject: dict[str, list[int]] = {}
    by_object: dict[str, list[int]] = {}
    by_predicate: dict[str, list[int]] = {}
    by_qval: dict[str, list[int]] = {}
    for i, s in enumerate(graph.statements):
        by_subject.setdefault(s.subject, []).append(i)
        by_predicate.setdefault(s.predicate, []).append(i)
        if isinstance(s.object, str):
            by_object.setdefault(s.object, []).append(i)
        for _, qval in s.qualifiers:
            if isinstance(qval, str):
                by_qval.setdefault(qval, []).append(i)
    graph._by_subject = {k: tuple(v) for k, v in by_subject.items()}
    graph._by_object = {k: tuple(v) for k, v in by_object.items()}
    graph._by_predicate = {k: tuple(v) for k, v in by_predicate.items()}
    graph._by_qualifier_value = {k: tuple(v) for k, v in by_qval.items()}

    aliases: dict[str, str] = {}
    for entity in graph.entities.values():
        for surface in (entity.label, *entity.aliases):
            key = surface.lower()
            aliases.setdefault(key, entity.id)  # first declaration wins
    graph._alias_to_entity = aliases
    if aliases:
        ordered = sorted(aliases, key=lambda a: (-len(a), a))
        pattern = "|".join(re.escape(a) for a in ordered)
        graph._alias_pattern = re.compile(rf"(?<!\w)(?:{pattern})(?!\w)", re.IGNORECASE)
    else:
        graph._alias_pattern = None


def dump_graph(graph: KnowledgeGraph) -> dict:
    """Serialize a graph back to its JSON document form (canonical times)."""
    return {
        "entities": [
            {"id": e.id, "label": e.label, "aliases": list(e.aliases)}
            for e in graph.entities.values()
        ],
        "predicates": [
            {"id": p.id, "label": p.label, "flags": sorted(f.value for f in p.flags)}
            for p in graph.predicates.values()
        ],
        "statements": [
            {
                "subject": s.subject,
                "predicate": s.predicate,
                "object": _value_to_json(s.object),
                "qualifiers": [
                    {"predicate": qp, **_value_to_json(qv)} for qp, qv in s.qualifiers
                ],
            }
            for s in graph.statements
        ],
    }


def neighbors(graph: KnowledgeGraph, entity_id: str) -> list[Statement]:
    """Every statement where the entity is subject, object or qualifier value.

    Deterministic: statements come back in insertion order, each at most once.
    """
    if entity_id not in graph.entities:
        raise GraphError(f"unknown entity: {entity_id!r}")
    seen: dict[int, None] = {}
    for index in (graph._by_subject, graph._by_object, graph._by_qualifier_value):
        for i in index.get(entity_id, ()):
            seen[i] = None
    return [graph.statements[i] for i in sorted(seen)]


def statement_time(graph: KnowledgeGraph, statement: Statement) -> StatementTime | None:
    """Extract the temporal qualifier annotation of a statement, if any."""
    point = start = end = None
    for qpred, qval in statement.qualifiers:
        if not isinstance(qval, Literal) or qval.kind is not LiteralKind.TIME:
            continue
        flags = graph.flags(qpred)
        if SchemaFlag.TEMPORAL_POINT in flags:
            point = qval.value
        elif SchemaFlag.TEMPORAL_START in flags:
            start = qval.value
        elif SchemaFlag.TEMPORAL_END in flags:
            end = qval.value
    if point is None and start is None and end is None:
        return None
    return StatementTime(point=point, start=start, end=end)


def temporal_of(graph: KnowledgeGraph, statement: Statement) -> Interval | None:
    """The interval a statement's temporal qualifiers span, if any.

    A point qualifier yields that value's own interval; start/end
    qualifiers span from the start value's first instant to the end
    value's last.  Statements whose object is itself a dated event entity
    carry no qualifier; resolve those through :func:`event_time` instead.
    """
    st = statement_time(graph, statement)
    return st.interval if st is not None else None


def event_time(graph: KnowledgeGraph, entity_id: str) -> TimeValue | None:
    """The time attribute of an event entity (first point-flagged statement)."""
    for s in graph.statements_by_subject(entity_id):
        if SchemaFlag.TEMPORAL_POINT in graph.flags(s.predicate):
            if isinstance(s.object, Literal) and s.object.kind is LiteralKind.TIME:
                return s.object.value
    return None


@dataclass(frozen=True)
class EntityLink:
    start: int
    end: int
    mention: str
    entity: str


def link_entities(graph: KnowledgeGraph, question: str) -> list[EntityLink]:
    """Greedy longest-match alias linking, case-insensitive, left to right.

    Returns non-overlapping spans; deterministic for identical input.
    """
    if graph._alias_pattern is None or not question:
        return []
    links = []
    for m in graph._alias_pattern.finditer(question):
        mention = m.group(0)
        entity = graph._alias_to_entity[mention.lower()]
        links.append(EntityLink(start=m.start(), end=m.end(), mention=mention, entity=entity))
    return links


def _literal_key(value: Literal) -> tuple:
    return ("lit", value.kind.value, value.render())


def _node_key(value: object) -> tuple:
    if isinstance(value, Literal):
        return _literal_key(value)
    return ("e", value)


def shortest_paths(
    graph: KnowledgeGraph,
    source: str,
    targets: set,
    max_hops: int = 2,
) -> list[tuple[str, ...]]:
    """All minimal-length predicate paths from an entity to any target.

    Targets may be entity ids or Literals.  Steps are predicate ids,
    prefixed with ``^`` when walked object-to-subject; a hop from a
    statement's subject to one of its qualifier values reads
    ``predicate@qualifier`` (reversed: ``^predicate@qualifier``).  The
    zero-hop path is excluded.  Used to mine which relations connect
    mentioned entities to answers.
    """
    if source not in graph.entities:
        raise GraphError(f"unknown entity: {source!r}")
    target_keys = {_node_key(t) for t in targets}
    frontier: dict[tuple, list[tuple[str, ...]]] = {("e", source): [()]}
    visited = {("e", source)}
    found: list[tuple[str, ...]] = []
    for _ in range(max_hops):
        nxt: dict[tuple, list[tuple[str, ...]]] = {}
        for node, paths in frontier.items():
            for step, neighbor in _moves(graph, node):
                if neighbor in visited:
                    continue
                for path in paths:
                    nxt.setdefault(neighbor, []).append(path + (step,))
        for node, paths in nxt.items():
            if node in target_keys:
                found.extend(paths)
        if found:
            break
        visited.update(nxt)
        frontier = nxt
        if not frontier:
            break
    return sorted(set(found))


def _moves(graph: KnowledgeGraph, node: tuple):
    if node[0] != "e":
        return
    entity_id = node[1]
    for s in graph.statements_by_subject(entity_id):
        yield s.predicate, _node_key(s.object)
        for qpred, qval in s.qualifiers:
            yield f"{s.predicate}@{qpred}", _node_key(qval)
    for s in graph.statements_by_object(entity_id):
        yield f"^{s.predicate}", ("e", s.subject)
    for s in graph.statements_by_qualifier_value(entity_id):
        for qpred, qval in s.qualifiers:
            if _node_key(qval) == node:
                yield f"^{s.predicate}@{qpred}", ("e", s.subject)  # back to subject
