"""Turn annotations into temporal constraints and candidate interpretations.

Constraints come in five shapes: an event tied to an explicit time value or
ordinal, a typed relation between an event and a time or another event, and
the bare "when did it happen" query.  Each constraint evokes one or more
interpretation templates describing what knowledge-graph evidence could
realize it; grounding decides which templates survive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .annotate import AnnotationDoc, EventKind, EventMention, OrdinalMention, TimexMention
from .temporal import ComparisonPredicate, TimeMLRelType, normalize_reltype


class ConstraintKind(enum.Enum):
    HAS_VALUE_TIME = "HAS_VALUE_TIME"
    HAS_VALUE_ORDINAL = "HAS_VALUE_ORDINAL"
    RELATION_ET = "RELATION_ET"
    RELATION_EE = "RELATION_EE"
    WHEN_QUERY = "WHEN_QUERY"


@dataclass(frozen=True)
class TemporalConstraint:
    kind: ConstraintKind
    event: EventMention
    reltype: TimeMLRelType | None = None
    related: object = None  # EventMention | TimexMention | OrdinalMention | None

    def render(self) -> str:
        if self.kind is ConstraintKind.RELATION_ET or self.kind is ConstraintKind.RELATION_EE:
            return f'Relation({self.reltype.value}, "{self.event.text}", "{self.related.text}")'
        if self.kind is ConstraintKind.WHEN_QUERY:
            return f'WHEN_QUERY("{self.event.text}")'
        return f'{self.kind.value}("{self.event.text}", "{self.related.text}")'


class Structure(enum.Enum):
    """The six interpretation structures, numbered as the CLI exposes them."""

    COMPARISON = 1
    ORDERING = 2
    DIRECT = 3
    SAME_ENTITY = 4
    PART_OF = 5
    SEQUENCE = 6


@dataclass(frozen=True)
class InterpretationTemplate:
    structure: Structure
    constraint: TemporalConstraint
    predicate: ComparisonPredicate | None = None  # comparison templates only
    projection: bool = False  # answer the time value instead of filtering by it


def evoke_constraints(doc: AnnotationDoc) -> list[TemporalConstraint]:
    """Extract the temporal constraints a question expresses.

    Deterministic order: the when-interrogative first, then relation
    constraints in link order, then value constraints.  An empty list means
    the question is temporally unconstrained.
    """
    constraints: list[TemporalConstraint] = []

    if _leading_when(doc):
        main = _main_event(doc)
        if main is not None:
            constraints.append(TemporalConstraint(kind=ConstraintKind.WHEN_QUERY, event=main))

    for link in doc.tlinks:
        if isinstance(link.related, TimexMention):
            kind = ConstraintKind.RELATION_ET
        else:
            kind = ConstraintKind.RELATION_EE
        constraints.append(
            TemporalConstraint(kind=kind, event=link.target, reltype=link.reltype, related=link.related)
        )

    linked_timexes = {link.related.span for link in doc.tlinks if isinstance(link.related, TimexMention)}
    for timex in doc.timexes:
        if timex.span in linked_timexes:
            continue
        event = _nearest_event(doc, timex.span[0])
        if event is not None:
            constraints.append(
                TemporalConstraint(kind=ConstraintKind.HAS_VALUE_TIME, event=event, related=timex)
            )

    for ordinal in doc.ordinals:
        event = _ordinal_event(doc, ordinal)
        if event is not None:
            constraints.append(
                TemporalConstraint(kind=ConstraintKind.HAS_VALUE_ORDINAL, event=event, related=ordinal)
            )

    return constraints


def _leading_when(doc: AnnotationDoc) -> bool:
    lowers = [t.lower for t in doc.tokens]
    if not lowers:
        return False
    return lowers[0] == "when" or lowers[:2] == ["what", "year"]


def _main_event(doc: AnnotationDoc) -> EventMention | None:
    for event in doc.events:
        if event.kind is EventKind.PREDICATIVE:
            return event
    return doc.events[0] if doc.events else None


def _nearest_event(doc: AnnotationDoc, position: int) -> EventMention | None:
    if not doc.events:
        return None
    # prefer the preceding mention on ties
    return min(doc.events, key=lambda e: (abs(e.span[0] - position), e.span[0] > position))


def _ordinal_event(doc: AnnotationDoc, ordinal: OrdinalMention) -> EventMention | None:
    pos = ordinal.span[0]
    following_nominals = [
        e for e in doc.events if e.kind is EventKind.NOMINAL and e.span[0] > pos
    ]
    if following_nominals:
        return following_nominals[0]
    return _nearest_event(doc, pos)


_SAME_ENTITY_RELTYPES = {TimeMLRelType.SIMULTANEOUS}
_PART_OF_RELTYPES = {TimeMLRelType.INCLUDES, TimeMLRelType.IS_INCLUDED, TimeMLRelType.DURING}
_SEQUENCE_RELTYPES = {
    TimeMLRelType.BEFORE,
    TimeMLRelType.AFTER,
    TimeMLRelType.IBEFORE,
    TimeMLRelType.IAFTER,
}


def evoke_interpretations(constraint: TemporalConstraint) -> list[InterpretationTemplate]:
    """The candidate interpretation templates for one constraint.

    Relation constraints between two events evoke both an intrinsic
    connection structure (same entity, part-of, or sequence, depending on
    the relation family) and the quantitative comparison fallback; relation
    types outside those families fall through to comparison only.  Value
    constraints always carry the direct-query alternative.
    """
    kind = constraint.kind
    if kind is ConstraintKind.HAS_VALUE_TIME:
        return [
            InterpretationTemplate(Structure.COMPARISON, constraint, predicate=ComparisonPredicate.EQUAL),
            InterpretationTemplate(Structure.DIRECT, constraint),
        ]
    if kind is ConstraintKind.HAS_VALUE_ORDINAL:
        return [
            InterpretationTemplate(Structure.ORDERING, constraint),
            InterpretationTemplate(Structure.DIRECT, constraint),
        ]
    if kind is ConstraintKind.WHEN_QUERY:
        return [InterpretationTemplate(Structure.COMPARISON, constraint, projection=True)]

    predicate = normalize_reltype(constraint.reltype)
    if kind is ConstraintKind.RELATION_ET:
        return [InterpretationTemplate(Structure.COMPARISON, constraint, predicate=predicate)]

    templates = []
    if constraint.reltype in _SAME_ENTITY_RELTYPES:
        templates.append(InterpretationTemplate(Structure.SAME_ENTITY, constraint))
    elif constraint.reltype in _PART_OF_RELTYPES:
        templates.append(InterpretationTemplate(Structure.PART_OF, constraint))
    elif constraint.reltype in _SEQUENCE_RELTYPES:
        templates.append(InterpretationTemplate(Structure.SEQUENCE, constraint))
    templates.append(InterpretationTemplate(Structure.COMPARISON, constraint, predicate=predicate))
    return templates
