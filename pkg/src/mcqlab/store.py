"""Annotation session store: append-only log with revision checks.

Every write appends one line ``{"mcq_id", "revision", "record"}`` to the
log; recovery replays the log and keeps the highest revision per MCQ.
``compact`` rewrites the log with only the current revisions. Writes are
serialized under one lock (annotation traffic is single-user scale);
reads touch immutable snapshots and need no lock.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .corpus_io import Corpus, check_against_corpus, parse_annotation
from .model import AnnotationRecord


class RevisionConflict(Exception):
    def __init__(self, mcq_id: str, expected: int, current: int) -> None:
        self.expected, self.current = expected, current
        super().__init__(
            f"{mcq_id}: expected revision {expected}, current is {current}")


class AnnotationStore:
    def __init__(self, corpus: Corpus, log_path: "str | Path") -> None:
        self.corpus = corpus
        self.log_path = Path(log_path)
        self._lock = threading.Lock()
        self._records: Dict[str, AnnotationRecord] = {}
        self._revisions: Dict[str, int] = {}
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        for lineno, line in enumerate(
                self.log_path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            entry = json.loads(line)
            record = parse_annotation(entry["record"],
                                      f"{self.log_path}:{lineno}")
            check_against_corpus(record, self.corpus,
                                 f"{self.log_path}:{lineno}")
            revision = int(entry["revision"])
            if revision > self._revisions.get(record.mcq_id, 0):
                self._records[record.mcq_id] = record
                self._revisions[record.mcq_id] = revision

    def get(self, mcq_id: str) -> Tuple[Optional[AnnotationRecord], int]:
        return self._records.get(mcq_id), self._revisions.get(mcq_id, 0)

    def put(self, mcq_id: str, raw_record: dict,
            expected_revision: Optional[int] = None
            ) -> Tuple[AnnotationRecord, int]:
        """Validate and persist a record; returns it with its new revision.

        Validation failures leave the previous revision untouched. When
        ``expected_revision`` is given it must match the current revision.
        """
        record = parse_annotation(dict(raw_record, mcq_id=mcq_id), mcq_id)
        check_against_corpus(record, self.corpus, mcq_id)
        with self._lock:
            current = self._revisions.get(mcq_id, 0)
            if expected_revision is not None and expected_revision != current:
                raise RevisionConflict(mcq_id, expected_revision, current)
            revision = current + 1
            entry = {"mcq_id": mcq_id, "revision": revision,
                     "record": record.to_json()}
            with self.log_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self._records[mcq_id] = record
            self._revisions[mcq_id] = revision
        return record, revision

    def records(self) -> List[AnnotationRecord]:
        return [self._records[m] for m in self.corpus.order if m in self._records]

    def annotated_count(self) -> int:
        return len(self._records)

    def compact(self) -> None:
        """Rewrite the log keeping only each MCQ's current revision."""
        with self._lock:
            tmp = self.log_path.with_suffix(".compact.tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for mcq_id in self.corpus.order:
                    if mcq_id in self._records:
                        entry = {"mcq_id": mcq_id,
                                 "revision": self._revisions[mcq_id],
                                 "record": self._records[mcq_id].to_json()}
                        fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            tmp.replace(self.log_path)
