"""Rule-based TimeML-lite annotation of questions.

Events, time expressions, ordinals and signals are recognized from small
editable lexicons (``resources/signals.json``, ``resources/events.json``)
plus regex and suffix heuristics; no tagger or model is involved, so the
annotation of a question is a pure function of its text.  Temporal links
pair each signal with its nearest preceding event and nearest following
event or time expression.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources as importlib_resources

from .temporal import Direction, TimeMLRelType, TimeParseError, TimeValue, parse_time_value


class SignalError(KeyError):
    """A signal lexeme has no relation type for the requested pairing."""


class MentionKind(enum.Enum):
    EVENT = "EVENT"
    TIMEX = "TIMEX"


class EventKind(enum.Enum):
    NOMINAL = "NOMINAL"
    PREDICATIVE = "PREDICATIVE"


@dataclass(frozen=True)
class Token:
    text: str
    lower: str
    tag: str
    start: int  # char offset into the question
    end: int


@dataclass(frozen=True)
class EventMention:
    span: tuple[int, int]  # token index range, end exclusive
    text: str
    kind: EventKind
    lemma: str


@dataclass(frozen=True)
class TimexMention:
    span: tuple[int, int]
    text: str
    value: TimeValue


@dataclass(frozen=True)
class OrdinalMention:
    span: tuple[int, int]
    text: str
    rank: int
    direction: Direction


@dataclass(frozen=True)
class SignalMention:
    span: tuple[int, int]
    text: str
    lexeme: str


@dataclass(frozen=True)
class TLink:
    reltype: TimeMLRelType
    target: EventMention
    related: object  # EventMention | TimexMention
    signal: SignalMention


@dataclass
class AnnotationDoc:
    question: str
    tokens: list[Token]
    events: list[EventMention] = field(default_factory=list)
    timexes: list[TimexMention] = field(default_factory=list)
    ordinals: list[OrdinalMention] = field(default_factory=list)
    signals: list[SignalMention] = field(default_factory=list)
    tlinks: list[TLink] = field(default_factory=list)

    def to_xml(self) -> str:
        """Render the annotation as inline TimeML-style XML plus link tags."""
        ids: dict[tuple[int, int], str] = {}
        for i, ev in enumerate(self.events, 1):
            ids[ev.span] = f"e{i}"
        for i, tx in enumerate(self.timexes, 1):
            ids[tx.span] = f"t{i}"
        for i, sig in enumerate(self.signals, 1):
            ids[sig.span] = f"s{i}"
        pieces = []
        cursor = 0
        for idx, tok in enumerate(self.tokens):
            pieces.append(self.question[cursor:tok.start])
            span = (idx, idx + 1)
            wrapped = self.question[tok.start:tok.end]
            if any(ev.span == span for ev in self.events):
                wrapped = f'<EVENT eid="{ids[span]}">{wrapped}</EVENT>'
            elif any(tx.span == span for tx in self.timexes):
                wrapped = f'<TIMEX tid="{ids[span]}">{wrapped}</TIMEX>'
            elif any(sig.span == span for sig in self.signals):
                wrapped = f'<SIGNAL sid="{ids[span]}">{wrapped}</SIGNAL>'
            pieces.append(wrapped)
            cursor = tok.end
        pieces.append(self.question[cursor:])
        lines = ["".join(pieces)]
        for link in self.tlinks:
            lines.append(
                f'<TLINK reltype="{link.reltype.value}" target="{ids[link.target.span]}"'
                f' relatedTo="{ids[link.related.span]}" signal="{ids[link.signal.span]}"/>'
            )
        return "\n".join(lines)


@lru_cache(maxsize=None)
def _signal_lexicon() -> dict:
    path = importlib_resources.files("tempq.resources") / "signals.json"
    return json.loads(path.read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def _event_lexicon() -> dict:
    path = importlib_resources.files("tempq.resources") / "events.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    return {
        "verbs": frozenset(data["verbs"]) | frozenset(stem(v) for v in data["verbs"]),
        "nouns": frozenset(data["nouns"]) | frozenset(stem(n) for n in data["nouns"]),
    }


_AUXILIARIES = frozenset(
    "is are am was were be been being do does did has have had having "
    "will would shall should can could may might must united named called".split()
)

_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5, "sixth": 6,
    "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10, "eleventh": 11,
    "twelfth": 12,
}

_ORDINAL_SUFFIX_RE = re.compile(r"^(\d+)(st|nd|rd|th)$")
_TIMEX_RE = re.compile(r"^\d{4}(-\d{1,2}){0,2}$")
_TOKEN_RE = re.compile(r"\S+")
_EDGE_PUNCT = ".,;:?!\"'()[]"

_SUFFIXES = ("ing", "ed", "es", "s", "or")


def stem(token: str) -> str:
    """Tiny suffix stripper shared by annotation and ranking features.

    Numeric ordinals reduce to their digits ("7th" to "7"); other tokens
    lose one common suffix and a trailing "e" when long enough.
    """
    t = token.lower()
    m = _ORDINAL_SUFFIX_RE.match(t)
    if m:
        return m.group(1)
    for suffix in _SUFFIXES:
        if len(t) > 4 and t.endswith(suffix):
            t = t[: -len(suffix)]
            break
    if len(t) > 4 and t.endswith("e"):
        t = t[:-1]
    return t


def tokenize(question: str) -> list[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(question):
        text, start, end = m.group(0), m.start(), m.end()
        core = text.strip(_EDGE_PUNCT)
        if not core:
            continue
        offset = text.index(core)
        start, end = start + offset, start + offset + len(core)
        tokens.append(Token(text=core, lower=core.lower(), tag="WORD", start=start, end=end))
    return tokens


def _classify(tokens: list[Token]) -> list[Token]:
    signal_lex = _signal_lexicon()
    event_lex = _event_lexicon()
    out = []
    for tok in tokens:
        lower = tok.lower
        if lower in signal_lex:
            tag = "SIGNAL"
        elif lower in _ORDINAL_WORDS or lower == "last" or _ORDINAL_SUFFIX_RE.match(lower):
            tag = "ORDINAL"
        elif _TIMEX_RE.match(lower):
            tag = "TIMEX"
        elif lower in _AUXILIARIES:
            tag = "AUX"
        elif lower in event_lex["verbs"] or stem(lower) in event_lex["verbs"]:
            tag = "VERB"
        elif lower in event_lex["nouns"] or stem(lower) in event_lex["nouns"]:
            tag = "NOUN"
        elif len(lower) >= 5 and (lower.endswith("ing") or lower.endswith("ed")):
            tag = "VERB"  # suffix heuristic for unlisted eventive verbs
        else:
            tag = "WORD"
        out.append(Token(tok.text, lower, tag, tok.start, tok.end))
    return out


def annotate(question: str) -> AnnotationDoc:
    """Annotate a question with events, timexes, ordinals, signals, TLinks.

    Deterministic and stateless.  The worst case is an empty annotation
    set, never an error, except that an empty question is rejected.
    """
    if not question or not question.strip():
        raise ValueError("empty question")
    tokens = _classify(tokenize(question))
    doc = AnnotationDoc(question=question, tokens=tokens)

    for idx, tok in enumerate(tokens):
        span = (idx, idx + 1)
        if tok.tag == "VERB":
            doc.events.append(
                EventMention(span=span, text=tok.text, kind=EventKind.PREDICATIVE, lemma=stem(tok.lower))
            )
        elif tok.tag == "NOUN":
            doc.events.append(
                EventMention(span=span, text=tok.text, kind=EventKind.NOMINAL, lemma=stem(tok.lower))
            )
        elif tok.tag == "TIMEX":
            try:
                value = parse_time_value(tok.lower)
            except TimeParseError:
                continue
            doc.timexes.append(TimexMention(span=span, text=tok.text, value=value))
        elif tok.tag == "ORDINAL":
            if tok.lower == "last":
                rank, direction = 1, Direction.FROM_LAST
            elif tok.lower in _ORDINAL_WORDS:
                rank, direction = _ORDINAL_WORDS[tok.lower], Direction.FROM_FIRST
            else:
                rank, direction = int(_ORDINAL_SUFFIX_RE.match(tok.lower).group(1)), Direction.FROM_FIRST
            doc.ordinals.append(OrdinalMention(span=span, text=tok.text, rank=rank, direction=direction))
        elif tok.tag == "SIGNAL":
            doc.signals.append(SignalMention(span=span, text=tok.text, lexeme=tok.lower))

    doc.tlinks.extend(_build_tlinks(doc))
    return doc


def _build_tlinks(doc: AnnotationDoc) -> list[TLink]:
    links = []
    mentions = sorted(doc.events + doc.timexes, key=lambda m: m.span)
    for signal in doc.signals:
        pos = signal.span[0]
        preceding = [m for m in doc.events if m.span[1] <= pos]
        following = [m for m in mentions if m.span[0] > pos]
        if not preceding or not following:
            continue
        target = preceding[-1]
        related = following[0]
        kind = MentionKind.TIMEX if isinstance(related, TimexMention) else MentionKind.EVENT
        try:
            reltype = signal_to_reltype(signal.lexeme, kind)
        except SignalError:
            continue
        links.append(TLink(reltype=reltype, target=target, related=related, signal=signal))
    return links


def signal_to_reltype(lexeme: str, related_kind: MentionKind) -> TimeMLRelType:
    """The TimeML relation a signal evokes toward an event or timex.

    The lexicon keeps the direction explicit per entry; a lexeme with no
    entry for the requested side raises ``SignalError`` and the caller
    skips that signal.
    """
    entry = _signal_lexicon().get(lexeme)
    key = "timex" if related_kind is MentionKind.TIMEX else "event"
    if entry is None or key not in entry:
        raise SignalError(f"no relation type for signal {lexeme!r} with {key} argument")
    return TimeMLRelType(entry[key])
