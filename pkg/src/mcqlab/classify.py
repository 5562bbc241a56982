"""Heuristic classification of passages and MCQ units.

These classifiers are a suggestion layer: deterministic, total, and cheap.
An explicit classification on an annotation record always wins; the
suggestion is then kept only as metadata (see ``pipeline`` and ``server``).

Heuristics, documented for what they are:

* header-like line: non-empty, at most 8 words, no terminal sentence
  punctuation (a cheap, language-independent proxy for (sub)titles);
* a passage is non-continuous only when at least 90% of its non-empty
  lines look like list/table rows and no paragraph runs past one sentence
  (such texts are rare, the detector only flags candidates);
* aspect falls back to ``content`` because content-based units dominate the
  corpora this is built for.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .model import MCQUnit, TextPassage

_BULLET = re.compile(r"^[^\S\n]*[-*•·‣●][^\S\n]+")
_NUMBERED = re.compile(r"^[^\S\n]*\d{1,2}[.)][^\S\n]+")
_TABLE_ROW = re.compile(r"\t.*\t|[^\S\n]{3,}\S+[^\S\n]{3,}|\|.*\|")
_SENTENCE_END = re.compile(r"[.!?][\"')”’]?[^\S\n]")

# openings like "Anna, 17," or "Tom Smith, London:" shared by review-style
# member texts
_NAME_OPENING = re.compile(
    r"^[A-Z][a-z]+(?:[^\S\n][A-Z][a-z]+)?,[^\S\n]*(?:\d{1,3}|[A-Z][a-z]+)[,.:]"
)

_TERMINAL_SENTENCE_PUNCT = (".", "!", "?", ":", ";", ",")

# Vocabulary-probe cues: a quoted token plus one of these marks a
# word-meaning question. Checked before the structure cues so that
# 'The word "vast" in paragraph 2 means _' lands on vocabulary.
_QUOTE = re.compile(r"[\"“‘'].+?[\"”’']")
_VOCAB_CUES = (
    "means", "meaning", "closest in meaning", "refers to", "refer to",
    "can be replaced by", "could be replaced by", "synonym", "opposite of",
    "underlined word", "underlined phrase",
)
_STRUCTURE_CUES = (
    "best title", "good title", "proper title", "suitable title",
    "title for", "title of", "paragraph", "structure of the",
    "organized", "organised", "subtitle",
)


@dataclass(frozen=True)
class FormatEvidence:
    bullet_marker_count: int = 0
    header_like_line_count: int = 0
    numbered_list_count: int = 0
    table_like_line_count: int = 0

    @property
    def total(self) -> int:
        return (self.bullet_marker_count + self.header_like_line_count
                + self.numbered_list_count + self.table_like_line_count)

    def to_json(self) -> dict:
        return {
            "bullet_marker_count": self.bullet_marker_count,
            "header_like_line_count": self.header_like_line_count,
            "numbered_list_count": self.numbered_list_count,
            "table_like_line_count": self.table_like_line_count,
        }


def is_header_like(line: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return False
    if stripped.endswith(_TERMINAL_SENTENCE_PUNCT):
        return False
    if _BULLET.match(line) or _NUMBERED.match(line):
        return False
    return len(stripped.split()) <= 8


def _sentence_count(paragraph: str) -> int:
    ends = len(_SENTENCE_END.findall(paragraph + " "))
    return max(ends, 1)


def gather_format_evidence(passage: TextPassage) -> FormatEvidence:
    bullets = headers = numbered = table_like = 0
    for line in passage.body.split("\n"):
        if not line.strip():
            continue
        if _BULLET.match(line):
            bullets += 1
        elif _NUMBERED.match(line):
            numbered += 1
        elif _TABLE_ROW.search(line):
            table_like += 1
        elif is_header_like(line):
            headers += 1
    return FormatEvidence(
        bullet_marker_count=bullets,
        header_like_line_count=headers,
        numbered_list_count=numbered,
        table_like_line_count=table_like,
    )


def classify_text_format(passage: TextPassage) -> Tuple[str, FormatEvidence]:
    """Suggest continuous / partly_continuous / non_continuous.

    Continuous means no list/header/table evidence at all. Dominant
    list/table evidence with no real paragraphs suggests non-continuous;
    any lesser mix of evidence with ordinary paragraphs suggests partly
    continuous.
    """
    evidence = gather_format_evidence(passage)
    if evidence.total == 0:
        return "continuous", evidence

    lines = [l for l in passage.body.split("\n") if l.strip()]
    listy = (evidence.bullet_marker_count + evidence.numbered_list_count
             + evidence.table_like_line_count)
    paragraphs = [passage.body[s:e] for s, e in passage.paragraphs]
    multi_sentence = any(_sentence_count(p) > 1 for p in paragraphs)
    if lines and listy / len(lines) >= 0.9 and not multi_sentence:
        return "non_continuous", evidence
    return "partly_continuous", evidence


def classify_membership(passage: TextPassage) -> str:
    """Suggest single_member / multiple_member.

    Multiple-member texts repeat a structural template: at least two
    header-like section openers, or at least two paragraphs opening in the
    name/age/location review style. An introductory paragraph ahead of the
    repeated sections is fine.
    """
    openers = 0
    name_openings = 0
    for start, end in passage.paragraphs:
        first_line = passage.body[start:end].split("\n", 1)[0]
        if is_header_like(first_line):
            openers += 1
        if _NAME_OPENING.match(first_line):
            name_openings += 1
    if openers >= 2 or name_openings >= 2:
        return "multiple_member"
    return "single_member"


def classify_mcq_aspect(mcq: MCQUnit) -> str:
    """Suggest content / structure / vocabulary for an MCQ unit.

    Vocabulary cues outrank structure cues; everything unresolved is
    content.
    """
    stem = mcq.stem.lower()
    if _QUOTE.search(mcq.stem) and any(cue in stem for cue in _VOCAB_CUES):
        return "vocabulary"
    if any(cue in stem for cue in _STRUCTURE_CUES):
        return "structure"
    return "content"


def suggestions_for(mcq: MCQUnit, passage: TextPassage) -> dict:
    """The full suggestion bundle the annotation screen shows."""
    fmt, evidence = classify_text_format(passage)
    return {
        "text_format": fmt,
        "format_evidence": evidence.to_json(),
        "membership": classify_membership(passage),
        "aspect": classify_mcq_aspect(mcq),
        "stem_style": mcq.stem_style,
    }
