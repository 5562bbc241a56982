"""Core data model: passages, MCQ units, annotation records, scorecards.

Character offsets throughout are Unicode code-point offsets into the passage
body (never bytes), so spans survive re-encoding. Spans are half-open
``[start, end)`` ranges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

ALTERNATIVE_LABELS = ("A", "B", "C", "D")

# A paragraph break is one or more newlines, optionally surrounded by
# horizontal whitespace. A body without newlines is a single paragraph.
_PARAGRAPH_BREAK = re.compile(r"[ \t]*\n[\s]*")

_GAP_MARKER = re.compile(r"_+")


class SchemaError(ValueError):
    """A record violates the corpus or annotation schema."""


class SpanError(SchemaError):
    """A character span falls outside its passage body."""


class VocabularyError(SchemaError):
    """A categorical value is not in its variable's closed vocabulary."""


class ReferenceError_(SchemaError):
    """An annotation record references an unknown MCQ."""


def segment_paragraphs(body: str) -> List[Tuple[int, int]]:
    """Split a body into paragraph character ranges.

    Deterministic: the same body always yields the same ranges. Break runs
    are excluded from every range, so the union of ranges is a subset of
    ``[0, len(body))``. Empty segments (leading/trailing/duplicate breaks)
    are dropped.
    """
    ranges: List[Tuple[int, int]] = []
    pos = 0
    for m in _PARAGRAPH_BREAK.finditer(body):
        if m.start() > pos:
            ranges.append((pos, m.start()))
        pos = m.end()
    if pos < len(body):
        ranges.append((pos, len(body)))
    return ranges


def detect_stem_style(stem: str) -> str:
    """A stem containing a gap marker (one or more underscores) is a
    fill-in-the-gap task; anything else is an interrogative."""
    return "fill_in_gap" if _GAP_MARKER.search(stem) else "interrogative"


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise SpanError(f"invalid span [{self.start}, {self.end})")

    def check_within(self, length: int, what: str = "span") -> None:
        if self.end > length:
            raise SpanError(
                f"{what} [{self.start}, {self.end}) exceeds body length {length}"
            )

    def to_json(self) -> Dict[str, int]:
        return {"start": self.start, "end": self.end}


@dataclass(frozen=True)
class TextPassage:
    text_id: str
    body: str
    paragraphs: Tuple[Tuple[int, int], ...]
    format: str = "continuous"
    membership: str = "single_member"

    @classmethod
    def from_body(cls, text_id: str, body: str, **kwargs) -> "TextPassage":
        return cls(
            text_id=text_id,
            body=body,
            paragraphs=tuple(segment_paragraphs(body)),
            **kwargs,
        )

    def paragraph_index_of(self, offset: int) -> Optional[int]:
        """Paragraph containing a character offset, or None for break runs."""
        for i, (start, end) in enumerate(self.paragraphs):
            if start <= offset < end:
                return i
        return None


@dataclass(frozen=True)
class MCQUnit:
    mcq_id: str
    text_id: str
    stem: str
    alternatives: Tuple[str, str, str, str]
    key: str
    stem_style: str = ""
    aspect: str = "content"

    def __post_init__(self) -> None:
        if len(self.alternatives) != 4:
            raise SchemaError(
                f"{self.mcq_id}: expected 4 alternatives, got {len(self.alternatives)}"
            )
        if self.key not in ALTERNATIVE_LABELS:
            raise SchemaError(f"{self.mcq_id}: key {self.key!r} not in A-D")
        if not self.stem_style:
            object.__setattr__(self, "stem_style", detect_stem_style(self.stem))

    def alternative(self, label: str) -> str:
        return self.alternatives[ALTERNATIVE_LABELS.index(label)]

    @property
    def key_text(self) -> str:
        return self.alternative(self.key)

    @property
    def distractor_labels(self) -> Tuple[str, ...]:
        return tuple(l for l in ALTERNATIVE_LABELS if l != self.key)


@dataclass(frozen=True)
class ErrorMark:
    """A human-annotated problem on one MCQ element.

    ``element`` is one of ``text``, ``question``, ``alternative:<L>`` or
    ``interaction:<x_y>`` (matching the interaction error types). The span,
    when present, indexes into the element's own text.
    """

    element: str
    error_type: str
    span: Optional[Span] = None

    def to_json(self) -> dict:
        out: dict = {"element": self.element, "error_type": self.error_type}
        if self.span is not None:
            out["span"] = self.span.to_json()
        return out


@dataclass(frozen=True)
class Basis:
    """A passage span justifying one alternative's plausibility."""

    label: str
    span: Span

    def to_json(self) -> dict:
        return {"label": self.label, "start": self.span.start, "end": self.span.end}


@dataclass
class AnnotationRecord:
    """The human assessment of one MCQ.

    All rubric fields are optional so partially annotated records can be
    stored and resumed; :func:`mcqlab.scoring.validate_complete` reports
    what is still missing. ``toi_concepts`` is either a single resolved
    concept or one concept per alternative label.
    """

    mcq_id: str
    toi_concepts: Optional[Dict[str, str] | str] = None
    tom_tq: Optional[str] = None
    tom_ta: Optional[str] = None
    tom_gen: bool = False
    nphr: Optional[int] = None
    ni: Optional[int] = None
    nit: Optional[str] = None
    npar: Optional[str] = None
    ic: Optional[str] = None
    pod_per_distractor: Dict[str, str] = field(default_factory=dict)
    toc: Optional[str] = None
    bases: List[Basis] = field(default_factory=list)
    error_marks: List[ErrorMark] = field(default_factory=list)
    exclusion_flags: Set[str] = field(default_factory=set)
    # Explicit classifications override the heuristic suggestions when present.
    text_format: Optional[str] = None
    membership: Optional[str] = None
    aspect: Optional[str] = None

    def to_json(self) -> dict:
        """Canonical wire form: keys in schema order, no nulls."""
        out: dict = {"mcq_id": self.mcq_id}
        if self.toi_concepts is not None:
            out["toi_concepts"] = self.toi_concepts
        if self.tom_tq is not None:
            out["tom_tq"] = self.tom_tq
        if self.tom_ta is not None:
            out["tom_ta"] = self.tom_ta
        if self.tom_gen:
            out["tom_gen"] = True
        if self.nphr is not None:
            out["nphr"] = self.nphr
        if self.ni is not None:
            out["ni"] = self.ni
        if self.nit is not None:
            out["nit"] = self.nit
        if self.npar is not None:
            out["npar"] = self.npar
        if self.ic is not None:
            out["ic"] = self.ic
        if self.pod_per_distractor:
            out["pod_per_distractor"] = dict(sorted(self.pod_per_distractor.items()))
        if self.toc is not None:
            out["toc"] = self.toc
        if self.bases:
            out["bases"] = [b.to_json() for b in self.bases]
        if self.error_marks:
            out["error_marks"] = [m.to_json() for m in self.error_marks]
        if self.exclusion_flags:
            out["exclusion_flags"] = sorted(self.exclusion_flags)
        if self.text_format is not None:
            out["text_format"] = self.text_format
        if self.membership is not None:
            out["membership"] = self.membership
        if self.aspect is not None:
            out["aspect"] = self.aspect
        return out


VARIABLE_NAMES = ("TOI", "TOM", "NPhr", "NI", "NIt", "NPar", "IC", "POD", "TOC")


def points_to_number(points_x2: int) -> "int | float":
    """Render half-point units as an int when whole, else a float."""
    return points_x2 // 2 if points_x2 % 2 == 0 else points_x2 / 2


@dataclass(frozen=True)
class Scorecard:
    """Per-variable points for one MCQ, in half-point units, plus the total.

    The total is always the exact sum of the nine components; storing
    doubled integers keeps the .5-step variables exact.
    """

    mcq_id: str
    components_x2: Dict[str, int]

    def __post_init__(self) -> None:
        missing = [v for v in VARIABLE_NAMES if v not in self.components_x2]
        if missing:
            raise SchemaError(f"scorecard missing components: {missing}")

    @property
    def total_x2(self) -> int:
        return sum(self.components_x2[v] for v in VARIABLE_NAMES)

    @property
    def total(self) -> "int | float":
        return points_to_number(self.total_x2)

    def component(self, variable: str) -> "int | float":
        return points_to_number(self.components_x2[variable])

    def to_json(self) -> dict:
        out: dict = {"mcq_id": self.mcq_id}
        for v in VARIABLE_NAMES:
            out[v] = points_to_number(self.components_x2[v])
        out["total"] = self.total
        return out
