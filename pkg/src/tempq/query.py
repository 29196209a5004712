"""Executable query graphs: patterns, temporal filters, ordinal selection.

A query graph is a conjunctive pattern over statements.  Each edge matches
one statement (subject, predicate, object, plus any required qualifier
pairs) and may bind the statement's temporal annotation to a time
variable.  Filters test bound times against references through the
interval algebra; an ordinal selector sorts the surviving matches by time
and keeps the rank-th one.  Graph values are immutable and execution is
read-only, so distinct queries can run concurrently over one graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kg import KnowledgeGraph, Literal, LiteralKind, Statement, StatementTime, statement_time
from .temporal import (
    ACCEPTS,
    ComparisonPredicate,
    Direction,
    Interval,
    TimeValue,
    allen_relation,
)


class QueryError(ValueError):
    """The query graph violates a structural invariant."""


ANSWER_VAR = "ans"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Ent:
    id: str
    label: str


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class Qualifier:
    predicate: str
    label: str
    value: object  # Var | Ent | Lit


@dataclass(frozen=True)
class Edge:
    subject: object  # Var | Ent
    predicate: str
    label: str
    object: object  # Var | Ent | Lit
    qualifiers: tuple[Qualifier, ...] = ()
    time_var: str | None = None  # binds the statement's temporal annotation


@dataclass(frozen=True)
class TemporalFilter:
    """Require a bound time to bear ``predicate`` toward a reference.

    The subject is always a time variable; the reference is a constant
    time value or another time variable, so at least one side is a
    variable by construction.
    """

    predicate: ComparisonPredicate
    reference: object  # TimeValue | str (variable name)
    subject: str  # variable name


@dataclass(frozen=True)
class OrdinalSelector:
    key: str  # time variable
    rank: int
    direction: Direction

    def __post_init__(self):
        if self.rank < 1:
            raise QueryError(f"ordinal rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class QueryGraph:
    edges: tuple[Edge, ...]
    answer: str = ANSWER_VAR
    filters: tuple[TemporalFilter, ...] = ()
    ordinal: OrdinalSelector | None = None

    def variables(self) -> set[str]:
        bound = set()
        for edge in self.edges:
            for node in (edge.subject, edge.object, *(q.value for q in edge.qualifiers)):
                if isinstance(node, Var):
                    bound.add(node.name)
            if edge.time_var:
                bound.add(edge.time_var)
        return bound

    def validate(self) -> None:
        if not self.edges:
            raise QueryError("query graph has no edges")
        bound = self.variables()
        if self.answer not in bound:
            raise QueryError(f"answer variable ?{self.answer} is not bound by any edge")
        for f in self.filters:
            if f.subject not in bound:
                raise QueryError(f"filter references unbound variable ?{f.subject}")
            if isinstance(f.reference, str) and f.reference not in bound:
                raise QueryError(f"filter references unbound variable ?{f.reference}")
        if self.ordinal and self.ordinal.key not in bound:
            raise QueryError(f"ordinal selector references unbound variable ?{self.ordinal.key}")
        if not self._connected():
            raise QueryError("query graph is not connected")

    def _connected(self) -> bool:
        groups = [set(_edge_node_keys(edge)) for edge in self.edges]
        for f in self.filters:
            pair = {("var", f.subject)}
            if isinstance(f.reference, str):
                pair.add(("var", f.reference))
            groups.append(pair)
        merged: list[set] = []
        for group in groups:
            joined = set(group)
            rest = []
            for existing in merged:
                if existing & joined:
                    joined |= existing
                else:
                    rest.append(existing)
            rest.append(joined)
            merged = rest
        return len(merged) == 1


def _node_key(node) -> tuple:
    if isinstance(node, Var):
        return ("var", node.name)
    if isinstance(node, Ent):
        return ("ent", node.id)
    return ("lit", node.literal.kind.value, node.literal.render())


def _edge_node_keys(edge: Edge) -> list[tuple]:
    keys = [_node_key(edge.subject), _node_key(edge.object)]
    keys.extend(_node_key(q.value) for q in edge.qualifiers)
    if edge.time_var:
        keys.append(("var", edge.time_var))
    return keys


# -- execution ---------------------------------------------------------------


def _resolve(node, binding):
    if isinstance(node, Var):
        return binding.get(node.name)
    if isinstance(node, Ent):
        return node.id
    return node.literal


def _unify_node(node, value, binding):
    """Match a pattern node against a statement position; extend binding."""
    if isinstance(node, Var):
        seen = binding.get(node.name)
        if seen is None:
            new = dict(binding)
            new[node.name] = value
            return new
        return binding if seen == value else None
    expected = node.id if isinstance(node, Ent) else node.literal
    return binding if expected == value else None


def _match_edge(edge: Edge, statement: Statement, binding, graph) -> dict | None:
    if statement.predicate != edge.predicate:
        return None
    binding = _unify_node(edge.subject, statement.subject, binding)
    if binding is None:
        return None
    binding = _unify_node(edge.object, statement.object, binding)
    if binding is None:
        return None
    for q in edge.qualifiers:
        matched = None
        for qpred, qval in statement.qualifiers:
            if qpred != q.predicate:
                continue
            matched = _unify_node(q.value, qval, binding)
            if matched is not None:
                break
        if matched is None:
            return None
        binding = matched
    if edge.time_var:
        st = statement_time(graph, statement)
        if st is None:
            return None  # strict: facts without the needed time are excluded
        binding = _unify_node(Var(edge.time_var), st, binding)
        if binding is None:
            return None
    return binding


def _candidate_statements(edge: Edge, binding, graph: KnowledgeGraph) -> list[Statement]:
    subject = _resolve(edge.subject, binding)
    if isinstance(subject, str):
        return graph.statements_by_subject(subject)
    obj = _resolve(edge.object, binding)
    if isinstance(obj, str):
        return graph.statements_by_object(obj)
    return graph.statements_by_predicate(edge.predicate)


def _assignments(edges, binding, graph):
    if not edges:
        yield binding
        return
    head, rest = edges[0], edges[1:]
    for statement in _candidate_statements(head, binding, graph):
        extended = _match_edge(head, statement, binding, graph)
        if extended is not None:
            yield from _assignments(rest, extended, graph)


def _interval_of(value) -> Interval | None:
    if isinstance(value, StatementTime):
        return value.interval
    if isinstance(value, Literal) and value.kind is LiteralKind.TIME:
        return value.value.interval
    if isinstance(value, TimeValue):
        return value.interval
    return None


def _filter_holds(f: TemporalFilter, binding) -> bool:
    subject = _interval_of(binding.get(f.subject))
    if isinstance(f.reference, str):
        reference = _interval_of(binding.get(f.reference))
    else:
        reference = f.reference.interval
    if subject is None or reference is None:
        return False
    # The filter's subject bears the predicate toward the reference, so the
    # subject occupies the left-hand slot of the relation test.
    return allen_relation(subject, reference) in ACCEPTS[f.predicate]


def render_answer(value) -> str:
    if isinstance(value, Literal):
        return value.render()
    if isinstance(value, StatementTime):
        return value.projected.render()
    return str(value)


def _answer_value(value):
    if isinstance(value, StatementTime):
        return Literal(LiteralKind.TIME, value.projected)
    return value


def execute(query: QueryGraph, graph: KnowledgeGraph) -> frozenset:
    """Match the pattern, apply temporal filters, apply ordinal selection.

    Returns the duplicate-free set of answer bindings (entity ids and
    literals).  Deterministic: ordinal ties on equal time keys break by the
    answer's lexicographic rendering.
    """
    query.validate()
    survivors = []
    for binding in _assignments(list(query.edges), {}, graph):
        if all(_filter_holds(f, binding) for f in query.filters):
            survivors.append(binding)

    if query.ordinal is not None:
        keyed = {}
        for binding in survivors:
            interval = _interval_of(binding.get(query.ordinal.key))
            if interval is None:
                continue
            answer = _answer_value(binding[query.answer])
            keyed[(interval.start, render_answer(answer))] = answer
        ordered = [keyed[k] for k in sorted(keyed)]
        if query.ordinal.direction is Direction.FROM_LAST:
            ordered.reverse()
        if query.ordinal.rank > len(ordered):
            return frozenset()
        return frozenset({ordered[query.ordinal.rank - 1]})

    return frozenset(_answer_value(b[query.answer]) for b in survivors)


# -- serialization -----------------------------------------------------------

DEBUG = "DEBUG"
RANKING = "RANKING"


def _node_distances(query: QueryGraph) -> dict[tuple, int]:
    adjacency: dict[tuple, set[tuple]] = {}

    def connect(keys):
        for a in keys:
            for b in keys:
                if a != b:
                    adjacency.setdefault(a, set()).add(b)

    for edge in query.edges:
        connect(_edge_node_keys(edge))
    for f in query.filters:
        keys = [("var", f.subject)]
        if isinstance(f.reference, str):
            keys.append(("var", f.reference))
        connect(keys)

    start = ("var", query.answer)
    distances = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for node in frontier:
            for other in sorted(adjacency.get(node, ())):
                if other not in distances:
                    distances[other] = distances[node] + 1
                    nxt.append(other)
        frontier = nxt
    return distances


def _ordered_edges(query: QueryGraph) -> list[Edge]:
    distances = _node_distances(query)

    def key(edge: Edge):
        keys = _edge_node_keys(edge)
        dists = [distances.get(k, 99) for k in keys]
        far = max(zip(dists, (_plain_label(k) for k in keys)))
        return (min(dists), edge.label, far[1], _render_debug(edge.subject), _render_debug(edge.object))

    return sorted(query.edges, key=key)


def _plain_label(node_key: tuple) -> str:
    return node_key[1] if node_key[0] != "var" else ""


def _render_debug(node) -> str:
    if isinstance(node, Var):
        return f"?{node.name}"
    if isinstance(node, Ent):
        return node.id
    literal = node.literal
    if literal.kind is LiteralKind.INTEGER:
        return str(literal.value)
    return f'"{literal.render()}"'


def _reference_debug(reference) -> str:
    if isinstance(reference, str):
        return f"?{reference}"
    return f'"{reference.render()}"'


def _label_tokens(node, answer: str) -> list[str]:
    if isinstance(node, Var):
        return ["ANS"] if node.name == answer else []
    if isinstance(node, Ent):
        return node.label.split()
    return node.literal.render().split()


def serialize(query: QueryGraph, mode: str = DEBUG) -> str:
    """Render the query as text.

    DEBUG is a braces-and-keywords query for humans; RANKING is the same
    content as a bare token sequence: auxiliary punctuation and keywords
    dropped, ids replaced by labels, non-answer variables elided.  Both are
    deterministic: edges order by answer distance, then predicate label,
    then far-node label.
    """
    edges = _ordered_edges(query)
    if mode == DEBUG:
        lines = [f"SELECT ?{query.answer}", "WHERE {"]
        for edge in edges:
            parts = [_render_debug(edge.subject), edge.predicate, _render_debug(edge.object)]
            for q in edge.qualifiers:
                parts.append(f"{{{q.predicate} {_render_debug(q.value)}}}")
            if edge.time_var:
                parts.append(f"{{time -> ?{edge.time_var}}}")
            lines.append("  " + " ".join(parts) + " .")
        for f in sorted(query.filters, key=lambda f: (f.predicate.value, str(f.reference))):
            lines.append(f"  FILTER {f.predicate.value}(?{f.subject}, {_reference_debug(f.reference)})")
        lines.append("}")
        if query.ordinal is not None:
            lines.append(
                f"ORDINAL(?{query.ordinal.key}, {query.ordinal.rank}, {query.ordinal.direction.value})"
            )
        return "\n".join(lines)

    if mode != RANKING:
        raise ValueError(f"unknown serialization mode: {mode!r}")

    tokens: list[str] = []
    emitted: set[tuple] = set()
    answer_key = ("var", query.answer)
    for edge in edges:
        parts: list[str] = []
        subj = _label_tokens(edge.subject, query.answer)
        obj = _label_tokens(edge.object, query.answer)
        answer_here = answer_key in _edge_node_keys(edge) and answer_key not in emitted
        if edge.time_var == query.answer and answer_here:
            parts += ["ANS", "time"] + subj + edge.label.split() + obj
            parts += _qualifier_tokens(edge.qualifiers, query.answer, skip=None)
        elif answer_here and (subj == ["ANS"] or obj == ["ANS"]):
            other = obj if subj == ["ANS"] else subj
            parts += ["ANS"] + edge.label.split() + other
            parts += _qualifier_tokens(edge.qualifiers, query.answer, skip=None)
        elif answer_here:
            # the answer sits on a qualifier of this edge
            answer_qual = next(
                q for q in edge.qualifiers if isinstance(q.value, Var) and q.value.name == query.answer
            )
            parts += ["ANS"] + answer_qual.label.split()
            parts += subj + edge.label.split() + obj
            parts += _qualifier_tokens(edge.qualifiers, query.answer, skip=answer_qual)
        else:
            # continuation: predicate label, then any endpoint not yet shown
            parts += edge.label.split()
            if _node_key(edge.subject) not in emitted:
                parts += subj
            if _node_key(edge.object) not in emitted:
                parts += obj
            parts += _qualifier_tokens(edge.qualifiers, query.answer, skip=None)
        tokens += parts
        emitted.update(_edge_node_keys(edge))
    for f in sorted(query.filters, key=lambda f: (f.predicate.value, str(f.reference))):
        tokens.append(f.predicate.value.lower())
        if isinstance(f.reference, TimeValue):
            tokens += f.reference.render().split()
    if query.ordinal is not None:
        if query.ordinal.rank == 1:
            tokens.append("first" if query.ordinal.direction is Direction.FROM_FIRST else "last")
        else:
            tokens.append(str(query.ordinal.rank))
            if query.ordinal.direction is Direction.FROM_LAST:
                tokens.append("last")
    return " ".join(tokens)


def _qualifier_tokens(qualifiers, answer: str, skip) -> list[str]:
    tokens = []
    for q in qualifiers:
        if q is skip:
            continue
        tokens += q.label.split()
        tokens += _label_tokens(q.value, answer)
    return tokens


# -- metrics -----------------------------------------------------------------


def f1_score(predicted: frozenset, gold: frozenset) -> tuple[float, float, float]:
    """Precision, recall and F1, with empty predictions scoring precision 1.

    The empty-output convention makes an abstaining system precise but
    recall-free; 0/0 harmonic means are 0.
    """
    if not gold:
        raise ValueError("gold answer set must be nonempty")
    if not predicted:
        return (1.0, 0.0, 0.0)
    hit = len(set(predicted) & set(gold))
    precision = hit / len(predicted)
    recall = hit / len(gold)
    if precision + recall == 0:
        return (precision, recall, 0.0)
    return (precision, recall, 2 * precision * recall / (precision + recall))
