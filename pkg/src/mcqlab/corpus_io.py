"""Corpus and annotation file I/O.

Corpus input is the RACE distribution format: structured records with
``article`` (string), ``questions`` (array of strings), ``options`` (array
of 4-string arrays), ``answers`` (array of letters A-D) and ``id``. A path
may be a directory of per-article ``.txt``/``.json`` files, a single such
file, or a JSONL file with one record per line.

Annotations are line-delimited JSON, one record per MCQ (see
``docs/annotation_record.schema.json``). Several lines for the same MCQ
are log semantics: the last one wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .errors import check_mark
from .model import (
    ALTERNATIVE_LABELS,
    AnnotationRecord,
    Basis,
    ErrorMark,
    MCQUnit,
    ReferenceError_,
    SchemaError,
    Span,
    SpanError,
    TextPassage,
    VocabularyError,
)
from .vocab import check_value, closed_set, tables


class CorpusFormatError(SchemaError):
    """A corpus record is malformed; carries file and record context."""


@dataclass
class Corpus:
    passages: Dict[str, TextPassage] = field(default_factory=dict)
    mcqs: Dict[str, MCQUnit] = field(default_factory=dict)
    order: List[str] = field(default_factory=list)  # mcq ids in corpus order

    def add(self, passage: TextPassage, units: Iterable[MCQUnit]) -> None:
        self.passages[passage.text_id] = passage
        for unit in units:
            self.mcqs[unit.mcq_id] = unit
            self.order.append(unit.mcq_id)

    def units_of(self, text_id: str) -> List[MCQUnit]:
        return [self.mcqs[m] for m in self.order if self.mcqs[m].text_id == text_id]

    def pairs(self) -> Iterator[Tuple[TextPassage, MCQUnit]]:
        for mcq_id in self.order:
            unit = self.mcqs[mcq_id]
            yield self.passages[unit.text_id], unit

    def __len__(self) -> int:
        return len(self.order)


def mcq_id_for(text_id: str, index: int) -> str:
    # ':' stays a plain path character in URLs, unlike '#'
    return f"{text_id}:q{index}"


def _parse_article(raw: dict, where: str) -> Tuple[TextPassage, List[MCQUnit]]:
    for field_name in ("article", "questions", "options", "answers", "id"):
        if field_name not in raw:
            raise CorpusFormatError(f"{where}: missing field {field_name!r}")
    text_id = raw["id"]
    if not isinstance(text_id, str) or not text_id:
        raise CorpusFormatError(f"{where}: id must be a non-empty string")
    article = raw["article"]
    if not isinstance(article, str):
        raise CorpusFormatError(f"{where}: article must be a string")
    questions, options, answers = raw["questions"], raw["options"], raw["answers"]
    if not (len(questions) == len(options) == len(answers)):
        raise CorpusFormatError(
            f"{where}: questions/options/answers lengths differ "
            f"({len(questions)}/{len(options)}/{len(answers)})"
        )
    passage = TextPassage.from_body(text_id, article)
    units = []
    for i, (stem, opts, answer) in enumerate(zip(questions, options, answers)):
        ref = f"{where} question {i}"
        if not isinstance(opts, list) or len(opts) != 4:
            raise CorpusFormatError(
                f"{ref}: expected 4 options, got "
                f"{len(opts) if isinstance(opts, list) else type(opts).__name__}"
            )
        if answer not in ALTERNATIVE_LABELS:
            raise CorpusFormatError(f"{ref}: answer {answer!r} not in A-D")
        if not all(isinstance(o, str) for o in opts):
            raise CorpusFormatError(f"{ref}: options must be strings")
        units.append(MCQUnit(
            mcq_id=mcq_id_for(text_id, i),
            text_id=text_id,
            stem=stem,
            alternatives=tuple(opts),
            key=answer,
        ))
    return passage, units


def _iter_records(path: Path) -> Iterator[Tuple[dict, str]]:
    if path.is_dir():
        files = sorted(p for p in path.rglob("*") if p.suffix in (".txt", ".json"))
        if not files:
            raise CorpusFormatError(f"{path}: no .txt/.json corpus files found")
        for f in files:
            yield from _iter_records(f)
        return
    text = path.read_text(encoding="utf-8")
    stripped = text.strip()
    if not stripped:
        return
    if stripped.startswith("{") and "\n{" not in stripped:
        try:
            yield json.loads(stripped), str(path)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}: invalid JSON ({exc})") from exc
        return
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield json.loads(line), f"{path}:{lineno}"
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({exc})") from exc


def load_corpus(path: "str | Path") -> Corpus:
    """Load a RACE-format corpus from a file or directory.

    Malformed records raise :class:`CorpusFormatError` naming the file and
    record; unreadable paths raise the underlying ``OSError``.
    """
    corpus = Corpus()
    for raw, where in _iter_records(Path(path)):
        passage, units = _parse_article(raw, where)
        if passage.text_id in corpus.passages:
            raise CorpusFormatError(f"{where}: duplicate text id {passage.text_id!r}")
        corpus.add(passage, units)
    return corpus


def corpus_record(passage: TextPassage, units: List[MCQUnit]) -> dict:
    return {
        "id": passage.text_id,
        "article": passage.body,
        "questions": [u.stem for u in units],
        "options": [list(u.alternatives) for u in units],
        "answers": [u.key for u in units],
    }


def save_corpus(corpus: Corpus, path: "str | Path") -> None:
    """Serialize a corpus as JSONL, one article record per line."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for text_id, passage in corpus.passages.items():
            record = corpus_record(passage, corpus.units_of(text_id))
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Annotation records
# ---------------------------------------------------------------------------

def parse_annotation(raw: dict, where: str = "record") -> AnnotationRecord:
    """Parse and vocabulary-check one annotation record (no corpus checks)."""
    if "mcq_id" not in raw or not isinstance(raw["mcq_id"], str):
        raise SchemaError(f"{where}: missing mcq_id")
    t = tables()
    record = AnnotationRecord(mcq_id=raw["mcq_id"])

    toi = raw.get("toi_concepts")
    if toi is not None:
        if isinstance(toi, str):
            t.resolve_toi_concept(toi)
        elif isinstance(toi, dict):
            for label, concept in toi.items():
                check_value(label, ALTERNATIVE_LABELS, "alternative label")
                t.resolve_toi_concept(concept)
        else:
            raise SchemaError(f"{where}: toi_concepts must be a string or label map")
        record.toi_concepts = toi

    for attr, key, allowed in (
        ("tom_tq", "tom_tq", t.tom_relations),
        ("tom_ta", "tom_ta", t.tom_relations),
        ("nit", "nit", tuple(t.nit_points)),
        ("npar", "npar", tuple(t.npar_points)),
        ("ic", "ic", t.ic_categories),
        ("toc", "toc", tuple(t.toc_points)),
        ("text_format", "text_format", closed_set("text_formats")),
        ("membership", "membership", closed_set("memberships")),
        ("aspect", "aspect", closed_set("aspects")),
    ):
        value = raw.get(key)
        if value is not None:
            setattr(record, attr, check_value(value, allowed, key))

    record.tom_gen = bool(raw.get("tom_gen", False))

    for attr in ("nphr", "ni"):
        value = raw.get(attr)
        if value is not None:
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise SchemaError(f"{where}: {attr} must be an integer >= 1")
            setattr(record, attr, value)

    pods = raw.get("pod_per_distractor", {})
    if not isinstance(pods, dict):
        raise SchemaError(f"{where}: pod_per_distractor must be a label map")
    for label, category in pods.items():
        check_value(label, ALTERNATIVE_LABELS, "alternative label")
        check_value(category, tuple(t.pod_points), "POD category")
    record.pod_per_distractor = dict(pods)

    for b in raw.get("bases", []):
        check_value(b.get("label"), ALTERNATIVE_LABELS, "basis label")
        try:
            span = Span(int(b["start"]), int(b["end"]))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"{where}: basis needs integer start/end") from exc
        record.bases.append(Basis(label=b["label"], span=span))

    for m in raw.get("error_marks", []):
        span = None
        if "span" in m and m["span"] is not None:
            span = Span(int(m["span"]["start"]), int(m["span"]["end"]))
        mark = ErrorMark(element=m.get("element", ""), error_type=m.get("error_type", ""), span=span)
        check_mark(mark)
        record.error_marks.append(mark)

    flags = raw.get("exclusion_flags", [])
    allowed_flags = closed_set("exclusion_flags")
    for flag in flags:
        check_value(flag, allowed_flags, "exclusion flag")
    record.exclusion_flags = set(flags)

    return record


def check_against_corpus(record: AnnotationRecord, corpus: Corpus,
                         where: str = "record") -> None:
    """Referential and span checks for a parsed record."""
    unit = corpus.mcqs.get(record.mcq_id)
    if unit is None:
        raise ReferenceError_(f"{where}: unknown mcq_id {record.mcq_id!r}")
    body_len = len(corpus.passages[unit.text_id].body)
    for basis in record.bases:
        if basis.span.end > body_len:
            raise SpanError(
                f"{where}: basis {basis.label} span "
                f"[{basis.span.start}, {basis.span.end}) exceeds passage "
                f"length {body_len}"
            )


def load_annotations(path: "str | Path", corpus: Corpus) -> List[AnnotationRecord]:
    """Load annotation records and validate them against a loaded corpus.

    Later lines for the same MCQ replace earlier ones. Explicit text-level
    classifications must agree across the records of one passage.
    """
    by_id: Dict[str, AnnotationRecord] = {}
    order: List[str] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{where}: invalid JSON ({exc})") from exc
        record = parse_annotation(raw, where)
        check_against_corpus(record, corpus, where)
        if record.mcq_id not in by_id:
            order.append(record.mcq_id)
        by_id[record.mcq_id] = record

    records = [by_id[m] for m in order]
    _check_text_level_consistency(records, corpus, path)
    return records


def _check_text_level_consistency(records: List[AnnotationRecord],
                                  corpus: Corpus, path) -> None:
    declared: Dict[str, Dict[str, str]] = {}
    for record in records:
        text_id = corpus.mcqs[record.mcq_id].text_id
        for attr in ("text_format", "membership"):
            value = getattr(record, attr)
            if value is None:
                continue
            seen = declared.setdefault(text_id, {})
            if attr in seen and seen[attr] != value:
                raise SchemaError(
                    f"{path}: conflicting {attr} for text {text_id!r}: "
                    f"{seen[attr]!r} vs {value!r}"
                )
            seen[attr] = value


def save_annotations(records: Iterable[AnnotationRecord], path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
