"""Error typology: mechanical detectors, severity tiers, acceptability.

The typology distinguishes three severity tiers (severe, moderate, mild)
mapping onto four acceptability categories (unacceptable, partially
acceptable, mainly acceptable, acceptable). Only the worst finding counts:
aggregation is a max over the acceptability order.

Detectors cover the surface errors a program can find without reading
comprehension; every judgment-dependent type (grammaticality, overlap,
inconsistencies, subjective formulation, ...) enters exclusively through
annotation marks. Each detector's exact scope is documented on its helper;
spans index into the element's own text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import ALTERNATIVE_LABELS, ErrorMark, MCQUnit, Span, TextPassage, VocabularyError
from .vocab import error_elements_map, error_severity_map

SEVERITY_ORDER = ("severe", "moderate", "mild")

ACCEPTABILITY_ORDER = (
    "acceptable",
    "mainly_acceptable",
    "partially_acceptable",
    "unacceptable",
)

_SEVERITY_TO_CATEGORY = {
    "severe": "unacceptable",
    "moderate": "partially_acceptable",
    "mild": "mainly_acceptable",
}

_ELEMENT_RANK = {
    "text": 0,
    "question": 1,
    "alternative:A": 2,
    "alternative:B": 3,
    "alternative:C": 4,
    "alternative:D": 5,
}


@dataclass(frozen=True)
class ErrorFinding:
    """One problem on one MCQ element.

    ``element``: ``text``, ``question``, ``alternative:<L>``, or
    ``interaction:<pair>``. Detected findings always carry a span into the
    element's text; annotated findings may omit it.
    """

    mcq_id: str
    element: str
    error_type: str
    severity: str
    span: Optional[Span] = None
    source: str = "detected"

    def to_json(self) -> dict:
        out: dict = {
            "mcq_id": self.mcq_id,
            "element": self.element,
            "error_type": self.error_type,
            "severity": self.severity,
            "source": self.source,
        }
        if self.span is not None:
            out["span"] = self.span.to_json()
        return out


def severity_of(error_type: str) -> str:
    """The fixed severity tier of an error type."""
    try:
        return error_severity_map()[error_type]
    except KeyError:
        raise VocabularyError(f"unknown error type {error_type!r}") from None


def aggregate_category(findings: Iterable) -> str:
    """Acceptability of an element (or whole MCQ) given its findings.

    A max over the acceptability order: any severe finding makes the result
    unacceptable, else any moderate makes it partially acceptable, else any
    mild makes it mainly acceptable. Empty input is acceptable.
    """
    worst = 0
    for f in findings:
        severity = f.severity if isinstance(f, ErrorFinding) else severity_of(f.error_type)
        rank = ACCEPTABILITY_ORDER.index(_SEVERITY_TO_CATEGORY[severity])
        worst = max(worst, rank)
    return ACCEPTABILITY_ORDER[worst]


def finding_from_mark(mcq_id: str, mark: ErrorMark) -> ErrorFinding:
    """Lift an annotated mark into a finding, deriving its severity."""
    return ErrorFinding(
        mcq_id=mcq_id,
        element=mark.element,
        error_type=mark.error_type,
        severity=severity_of(mark.error_type),
        span=mark.span,
        source="annotated",
    )


def check_mark(mark: ErrorMark) -> None:
    """Validate an annotated mark against the typology."""
    severity_of(mark.error_type)
    base = mark.element.split(":", 1)[0]
    if base == "alternatives":
        base = "alternative"
    allowed = error_elements_map()[mark.error_type]
    if base not in allowed and base != "interaction":
        raise VocabularyError(
            f"error type {mark.error_type!r} does not apply to element "
            f"{mark.element!r}"
        )
    if base == "interaction" and "interaction" not in allowed:
        raise VocabularyError(
            f"error type {mark.error_type!r} is not an interaction type"
        )


# ---------------------------------------------------------------------------
# Mechanical detectors
#
# Every regex below defines the *detectable subset* of its error type; the
# fixtures in tests/ plant exactly these shapes. URLs and email addresses
# are masked first (a web address counts as one word).
# ---------------------------------------------------------------------------

_URL_OR_EMAIL = re.compile(
    r"(?:https?://\S+|www\.\S+|[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"
)

# one or more spaces immediately before closing punctuation: "word ,next"
_EXTRA_SPACE_BEFORE_PUNCT = re.compile(r"[^\S\n]+(?=[,.;:!?])")

# punctuation glued to a following word; two letters before the mark keeps
# abbreviations like "U.S.A." out of scope
_MISSING_SPACE_AFTER_PUNCT = re.compile(r"[A-Za-z]{2}[,.;:!?](?=[A-Za-z])")

# a space splitting a multi-digit number ("1 000") or a contraction
# ("don 't" / "don' t"); only known contraction tails, so quoted short
# words ("said 'no'") stay out of scope
_SPACE_IN_NUMBER = re.compile(r"\d[^\S\n]+\d")
_CONTRACTION_TAILS = r"(?:t|s|d|ll|re|ve|m)\b"
_SPACE_IN_CONTRACTION = re.compile(
    rf"[A-Za-z][^\S\n]+'{_CONTRACTION_TAILS}|[A-Za-z]'[^\S\n]+{_CONTRACTION_TAILS}"
)

# glued words/digits without punctuation involved: "12people", "page12",
# "theUnited". Ordinal suffixes and short unit suffixes after digits are
# exempt; so are capitalised name prefixes (Mc/Mac) before the case flip.
_DIGIT_THEN_WORD = re.compile(r"\d(?:st|nd|rd|th)?[A-Za-z]{3,}")
_ORDINAL = re.compile(r"\d(?:st|nd|rd|th)\b")
_WORD_THEN_DIGIT = re.compile(r"[A-Za-z]{3,}\d")
_CASE_FLIP = re.compile(r"[a-z][A-Z]")
_NAME_PREFIX = re.compile(r"(?:Mc|Mac)$")

_GAP_MARKER = re.compile(r"_+")
# in stems/alternatives the gap marker plus one following space is the
# legitimate fill-in-the-gap convention ("... about _ .")
_GAP_CONVENTION = re.compile(r"_+[^\S\n]?")

# markup/OCR junk: "prefix = st1 /" remnants and dash runs glued to a token
_ADDITIONAL_NOTES = re.compile(r"prefix\s*=\s*\S+\s*/|\S*-{3,}\S*")

_TERMINAL_PUNCT = (".", "!", "?")


def _masked(text: str) -> str:
    """Replace URLs/emails with same-length placeholders so offsets hold."""
    def blank(m: re.Match) -> str:
        return "x" * (m.end() - m.start())
    return _URL_OR_EMAIL.sub(blank, text)


def _scan(mcq_id: str, element: str, text: str) -> List[ErrorFinding]:
    masked = _masked(text)
    if element != "text":
        masked = _GAP_CONVENTION.sub(lambda m: "x" * (m.end() - m.start()), masked)
    found: List[Tuple[int, int, str]] = []

    for m in _EXTRA_SPACE_BEFORE_PUNCT.finditer(masked):
        found.append((m.start(), m.end(), "extra_spaces_punctuation"))

    for m in _MISSING_SPACE_AFTER_PUNCT.finditer(masked):
        # anchor the span on the punctuation mark itself
        found.append((m.end() - 1, m.end(), "missing_spaces_punctuation"))

    for m in _SPACE_IN_NUMBER.finditer(masked):
        found.append((m.start() + 1, m.end() - 1, "extra_spaces_word_digit"))
    for m in _SPACE_IN_CONTRACTION.finditer(masked):
        found.append((m.start(), m.end(), "extra_spaces_word_digit"))

    for m in _DIGIT_THEN_WORD.finditer(masked):
        if _ORDINAL.match(masked, m.start()):
            continue
        found.append((m.start(), m.end(), "missing_spaces_words_digits"))
    for m in _WORD_THEN_DIGIT.finditer(masked):
        found.append((m.start(), m.end(), "missing_spaces_words_digits"))
    for m in _CASE_FLIP.finditer(masked):
        if _NAME_PREFIX.search(masked, 0, m.start() + 1):
            continue
        found.append((m.start(), m.end(), "missing_spaces_words_digits"))

    if element == "text":
        for m in _GAP_MARKER.finditer(masked):
            found.append((m.start(), m.end(), "extra_gaps"))

    for m in _ADDITIONAL_NOTES.finditer(masked):
        found.append((m.start(), m.end(), "additional_notes"))

    out = []
    for start, end, error_type in sorted(found):
        out.append(ErrorFinding(
            mcq_id=mcq_id,
            element=element,
            error_type=error_type,
            severity=severity_of(error_type),
            span=Span(start, end),
        ))
    return out


def _alternative_formatting(mcq: MCQUnit) -> List[ErrorFinding]:
    """Mixed terminal punctuation or first-letter capitalisation across the
    four alternatives. The majority sets the convention (ties side with
    alternative A); each deviant alternative gets one finding per kind."""
    findings: List[ErrorFinding] = []
    alts = [a for a in mcq.alternatives]

    def convention(values: Sequence[bool]) -> Optional[bool]:
        trues = sum(values)
        if trues == len(values) or trues == 0:
            return None  # consistent
        return trues * 2 > len(values) or (trues * 2 == len(values) and values[0])

    nonempty = [(i, a) for i, a in enumerate(alts) if a.strip()]
    if len(nonempty) < 2:
        return findings

    punct = [a.rstrip().endswith(_TERMINAL_PUNCT) for _, a in nonempty]
    expected = convention(punct)
    if expected is not None:
        for (i, a), has in zip(nonempty, punct):
            if has != expected:
                stripped = a.rstrip()
                pos = max(len(stripped) - 1, 0)
                findings.append(ErrorFinding(
                    mcq_id=mcq.mcq_id,
                    element=f"alternative:{ALTERNATIVE_LABELS[i]}",
                    error_type="formatting_inconsistency",
                    severity=severity_of("formatting_inconsistency"),
                    span=Span(pos, pos + 1),
                ))

    def first_alpha(s: str) -> Optional[Tuple[int, str]]:
        for j, ch in enumerate(s):
            if ch.isalpha():
                return j, ch
        return None

    letters = [(i, a, first_alpha(a)) for i, a in nonempty]
    letters = [(i, a, fa) for i, a, fa in letters if fa is not None]
    if len(letters) >= 2:
        caps = [fa[1].isupper() for _, _, fa in letters]
        expected = convention(caps)
        if expected is not None:
            for (i, a, fa), is_upper in zip(letters, caps):
                if is_upper != expected:
                    findings.append(ErrorFinding(
                        mcq_id=mcq.mcq_id,
                        element=f"alternative:{ALTERNATIVE_LABELS[i]}",
                        error_type="formatting_inconsistency",
                        severity=severity_of("formatting_inconsistency"),
                        span=Span(fa[0], fa[0] + 1),
                    ))
    return findings


def detect_mechanical_errors(mcq: MCQUnit, passage: TextPassage) -> List[ErrorFinding]:
    """Run every mechanical detector over one MCQ and its passage.

    Total and deterministic; findings come out ordered by element (text,
    question, alternatives A-D) and ascending span. Gap markers are only
    flagged in the passage body, where an underscore run is a stray gap
    candidate; in a stem it is the legitimate fill-in-the-gap marker.
    """
    findings: List[ErrorFinding] = []
    findings.extend(_scan(mcq.mcq_id, "text", passage.body))
    findings.extend(_scan(mcq.mcq_id, "question", mcq.stem))
    for label, alt in zip(ALTERNATIVE_LABELS, mcq.alternatives):
        findings.extend(_scan(mcq.mcq_id, f"alternative:{label}", alt))
    findings.extend(_alternative_formatting(mcq))
    findings.sort(key=lambda f: (_ELEMENT_RANK.get(f.element, 9), f.span.start,
                                 f.span.end, f.error_type))
    return findings


def element_categories(findings: Iterable[ErrorFinding]) -> Dict[str, str]:
    """Acceptability per element plus the whole-MCQ aggregate under ``mcq``."""
    by_element: Dict[str, List[ErrorFinding]] = {}
    all_findings = list(findings)
    for f in all_findings:
        by_element.setdefault(f.element, []).append(f)
    out = {element: aggregate_category(fs) for element, fs in by_element.items()}
    out["mcq"] = aggregate_category(all_findings)
    return out
