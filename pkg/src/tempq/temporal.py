"""Granularity-aware time values and qualitative interval algebra.

A time expression like ``"1960"`` names a whole year, while ``"1960-10-7"``
names a single day.  Both are modeled as half-open calendar intervals sized
by their lexical granularity, so that mixed-granularity comparisons ("is the
day inside the year?") reduce to the thirteen qualitative relations between
intervals.  Everything in this module is an immutable value and every
function is pure, so concurrent use needs no coordination.
"""

from __future__ import annotations

import datetime as dt
import enum
import re
from dataclasses import dataclass


class TimeParseError(ValueError):
    """A lexical time expression could not be parsed."""


class Granularity(enum.Enum):
    YEAR = "YEAR"
    MONTH = "MONTH"
    DAY = "DAY"


class Direction(enum.Enum):
    """Sort direction for rank-based selection over time-ordered facts."""

    FROM_FIRST = "FROM_FIRST"
    FROM_LAST = "FROM_LAST"


@dataclass(frozen=True)
class Interval:
    """Half-open span ``[start, end)`` over any totally ordered instants."""

    start: object
    end: object

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty interval: [{self.start}, {self.end})")

    def intersects(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end


_TIME_RE = re.compile(r"^(\d{1,4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?$")


@dataclass(frozen=True, eq=False)
class TimeValue:
    """A granular time point with its derived half-open interval.

    ``text`` keeps the original lexical form; :meth:`render` produces the
    canonical zero-padded form used in all file formats.  Equality and
    hashing are semantic (granularity plus start instant), so ``"1960-10-7"``
    and ``"1960-10-07"`` compare equal.
    """

    text: str
    granularity: Granularity
    start: dt.date
    end: dt.date

    @property
    def interval(self) -> Interval:
        return Interval(self.start, self.end)

    def render(self) -> str:
        if self.granularity is Granularity.YEAR:
            return f"{self.start.year:04d}"
        if self.granularity is Granularity.MONTH:
            return f"{self.start.year:04d}-{self.start.month:02d}"
        return self.start.isoformat()

    def __eq__(self, other):
        if not isinstance(other, TimeValue):
            return NotImplemented
        return self.granularity is other.granularity and self.start == other.start

    def __hash__(self):
        return hash((self.granularity, self.start))

    def __repr__(self):
        return f"TimeValue({self.render()!r})"


def parse_time_value(text: str) -> TimeValue:
    """Parse an ISO-8601 date prefix ("YYYY", "YYYY-MM" or "YYYY-MM-DD").

    Components may be unpadded.  The value spans exactly one unit of its
    granularity: the year 1960 covers [1960-01-01, 1961-01-01).
    """
    m = _TIME_RE.match(text.strip())
    if m is None:
        raise TimeParseError(f"not a time expression: {text!r}")
    year_s, month_s, day_s = m.groups()
    year = int(year_s)
    if not 1 <= year <= 9998:
        raise TimeParseError(f"year out of range in {text!r}: {year_s!r}")
    try:
        if month_s is None:
            start = dt.date(year, 1, 1)
            end = dt.date(year + 1, 1, 1)
            gran = Granularity.YEAR
        elif day_s is None:
            month = int(month_s)
            start = dt.date(year, month, 1)
            end = _next_month(start)
            gran = Granularity.MONTH
        else:
            start = dt.date(year, int(month_s), int(day_s))
            end = start + dt.timedelta(days=1)
            gran = Granularity.DAY
    except ValueError as exc:
        raise TimeParseError(f"bad calendar component in {text!r}: {exc}") from None
    return TimeValue(text=text.strip(), granularity=gran, start=start, end=end)


def _next_month(d: dt.date) -> dt.date:
    if d.month == 12:
        return dt.date(d.year + 1, 1, 1)
    return dt.date(d.year, d.month + 1, 1)


class AllenRelation(enum.Enum):
    """The thirteen mutually exclusive qualitative interval relations."""

    BEFORE = "BEFORE"
    AFTER = "AFTER"
    MEETS = "MEETS"
    MET_BY = "MET_BY"
    OVERLAPS = "OVERLAPS"
    OVERLAPPED_BY = "OVERLAPPED_BY"
    STARTS = "STARTS"
    STARTED_BY = "STARTED_BY"
    DURING = "DURING"
    CONTAINS = "CONTAINS"
    FINISHES = "FINISHES"
    FINISHED_BY = "FINISHED_BY"
    EQUAL = "EQUAL"


# maps each relation to its converse: allen_relation(a, b) vs (b, a)
CONVERSE = {
    AllenRelation.BEFORE: AllenRelation.AFTER,
    AllenRelation.AFTER: AllenRelation.BEFORE,
    AllenRelation.MEETS: AllenRelation.MET_BY,
    AllenRelation.MET_BY: AllenRelation.MEETS,
    AllenRelation.OVERLAPS: AllenRelation.OVERLAPPED_BY,
    AllenRelation.OVERLAPPED_BY: AllenRelation.OVERLAPS,
    AllenRelation.STARTS: AllenRelation.STARTED_BY,
    AllenRelation.STARTED_BY: AllenRelation.STARTS,
    AllenRelation.DURING: AllenRelation.CONTAINS,
    AllenRelation.CONTAINS: AllenRelation.DURING,
    AllenRelation.FINISHES: AllenRelation.FINISHED_BY,
    AllenRelation.FINISHED_BY: AllenRelation.FINISHES,
    AllenRelation.EQUAL: AllenRelation.EQUAL,
}


def allen_relation(a: Interval, b: Interval) -> AllenRelation:
    """Classify the relation of ``a`` toward ``b`` by endpoint comparison.

    Exactly one relation holds for any ordered pair of valid intervals.
    With half-open intervals, MEETS means the spans are adjacent with no
    gap and no common point.
    """
    if a.end < b.start:
        return AllenRelation.BEFORE
    if a.end == b.start:
        return AllenRelation.MEETS
    if b.end < a.start:
        return AllenRelation.AFTER
    if b.end == a.start:
        return AllenRelation.MET_BY
    if a.start == b.start:
        if a.end == b.end:
            return AllenRelation.EQUAL
        return AllenRelation.STARTS if a.end < b.end else AllenRelation.STARTED_BY
    if a.end == b.end:
        return AllenRelation.FINISHES if a.start > b.start else AllenRelation.FINISHED_BY
    if b.start < a.start and a.end < b.end:
        return AllenRelation.DURING
    if a.start < b.start and b.end < a.end:
        return AllenRelation.CONTAINS
    return AllenRelation.OVERLAPS if a.start < b.start else AllenRelation.OVERLAPPED_BY


class TimeMLRelType(enum.Enum):
    """The thirteen TimeML temporal link relation types."""

    BEFORE = "BEFORE"
    AFTER = "AFTER"
    INCLUDES = "INCLUDES"
    IS_INCLUDED = "IS_INCLUDED"
    DURING = "DURING"
    SIMULTANEOUS = "SIMULTANEOUS"
    IAFTER = "IAFTER"
    IBEFORE = "IBEFORE"
    IDENTITY = "IDENTITY"
    BEGINS = "BEGINS"
    ENDS = "ENDS"
    BEGUN_BY = "BEGUN_BY"
    ENDED_BY = "ENDED_BY"


class ComparisonPredicate(enum.Enum):
    """Algebraic comparison predicates over pairs of time values."""

    EQUAL = "EQUAL"
    BEFORE = "BEFORE"
    AFTER = "AFTER"
    INCLUDES = "INCLUDES"
    IS_INCLUDED = "IS_INCLUDED"
    OVERLAPS = "OVERLAPS"


# Accept-sets: which Allen relations each predicate admits.  INCLUDES and
# IS_INCLUDED are non-strict (EQUAL admitted) so that a year-granular fact
# still matches a year-granular reference.  OVERLAPS admits every relation
# with a nonempty intersection, which for half-open intervals excludes
# BEFORE/AFTER/MEETS/MET_BY.
ACCEPTS = {
    ComparisonPredicate.EQUAL: frozenset({AllenRelation.EQUAL}),
    ComparisonPredicate.BEFORE: frozenset({AllenRelation.BEFORE, AllenRelation.MEETS}),
    ComparisonPredicate.AFTER: frozenset({AllenRelation.AFTER, AllenRelation.MET_BY}),
    ComparisonPredicate.INCLUDES: frozenset(
        {
            AllenRelation.CONTAINS,
            AllenRelation.STARTED_BY,
            AllenRelation.FINISHED_BY,
            AllenRelation.EQUAL,
        }
    ),
    ComparisonPredicate.IS_INCLUDED: frozenset(
        {
            AllenRelation.DURING,
            AllenRelation.STARTS,
            AllenRelation.FINISHES,
            AllenRelation.EQUAL,
        }
    ),
    ComparisonPredicate.OVERLAPS: frozenset(
        set(AllenRelation)
        - {
            AllenRelation.BEFORE,
            AllenRelation.AFTER,
            AllenRelation.MEETS,
            AllenRelation.MET_BY,
        }
    ),
}


def satisfies(
    pred: ComparisonPredicate,
    reference: "TimeValue | Interval",
    subject: "TimeValue | Interval",
) -> bool:
    """True iff the reference bears ``pred`` toward the subject.

    The reference sits on the left: ``satisfies(INCLUDES, "1960",
    "1960-10-7")`` asks whether the year 1960 includes that day, and is
    true.
    """
    a = reference.interval if isinstance(reference, TimeValue) else reference
    b = subject.interval if isinstance(subject, TimeValue) else subject
    return allen_relation(a, b) in ACCEPTS[pred]


# TimeML reltypes read event-first ("the event IS_INCLUDED in 1960"), and the
# normalized predicate keeps that orientation: it is the relation the
# annotated event's time bears toward the related time.
_RELTYPE_TO_PREDICATE = {
    TimeMLRelType.BEFORE: ComparisonPredicate.BEFORE,
    TimeMLRelType.IBEFORE: ComparisonPredicate.BEFORE,
    TimeMLRelType.ENDS: ComparisonPredicate.BEFORE,
    TimeMLRelType.AFTER: ComparisonPredicate.AFTER,
    TimeMLRelType.IAFTER: ComparisonPredicate.AFTER,
    TimeMLRelType.BEGINS: ComparisonPredicate.AFTER,
    TimeMLRelType.INCLUDES: ComparisonPredicate.INCLUDES,
    TimeMLRelType.BEGUN_BY: ComparisonPredicate.INCLUDES,
    TimeMLRelType.ENDED_BY: ComparisonPredicate.INCLUDES,
    TimeMLRelType.IS_INCLUDED: ComparisonPredicate.IS_INCLUDED,
    TimeMLRelType.DURING: ComparisonPredicate.IS_INCLUDED,
    TimeMLRelType.SIMULTANEOUS: ComparisonPredicate.OVERLAPS,
    TimeMLRelType.IDENTITY: ComparisonPredicate.EQUAL,
}


def normalize_reltype(reltype: TimeMLRelType) -> ComparisonPredicate:
    """Map a TimeML relation type to its algebraic comparison predicate."""
    return _RELTYPE_TO_PREDICATE[reltype]
