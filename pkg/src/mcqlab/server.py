"""Local annotation service.

Serves the corpus read-only, persists annotation records through the
append-only store, computes live validation findings and scorecards, and
exposes the analysis reports. Request and response bodies use the same
structured-record schemas as the files, so the API and the file formats
are interchangeable. Single annotator on localhost; no authentication.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .classify import suggestions_for
from .corpus_io import Corpus
from .errors import detect_mechanical_errors, element_categories
from .model import SchemaError
from .pipeline import REPORT_KINDS, build_reports
from .scoring import IncompleteAnnotationError, score_total, validate_complete
from .store import AnnotationStore, RevisionConflict
from .vocab import raw_vocabulary

_STATIC_DIR = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"


def _score_or_findings(record, mcq) -> dict:
    findings = validate_complete(record, mcq)
    payload: dict = {"findings": [f.to_json() for f in findings],
                     "scorecard": None}
    if not any(f.kind == "missing" for f in findings):
        try:
            payload["scorecard"] = score_total(record).to_json()
        except (IncompleteAnnotationError, SchemaError):
            pass  # e.g. a 3-to-1 split: findings already explain it
    return payload


def create_app(corpus: Corpus, store: AnnotationStore,
               static_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="mcqlab annotation server")

    @app.get("/api/corpus")
    def corpus_index() -> dict:
        mcqs = []
        for mcq_id in corpus.order:
            unit = corpus.mcqs[mcq_id]
            _, revision = store.get(mcq_id)
            mcqs.append({"mcq_id": mcq_id, "text_id": unit.text_id,
                         "annotated": revision > 0})
        return {
            "mcqs": mcqs,
            "progress": {"annotated": store.annotated_count(),
                         "total": len(corpus.order)},
        }

    @app.get("/api/vocabulary")
    def vocabulary() -> dict:
        return raw_vocabulary()

    @app.get("/api/mcq/{mcq_id}")
    def mcq_bundle(mcq_id: str) -> dict:
        unit = corpus.mcqs.get(mcq_id)
        if unit is None:
            raise HTTPException(status_code=404, detail=f"unknown MCQ {mcq_id!r}")
        passage = corpus.passages[unit.text_id]
        record, revision = store.get(mcq_id)
        findings = detect_mechanical_errors(unit, passage)
        bundle = {
            "mcq": {
                "mcq_id": unit.mcq_id,
                "text_id": unit.text_id,
                "stem": unit.stem,
                "stem_style": unit.stem_style,
                "alternatives": dict(zip("ABCD", unit.alternatives)),
                "key": unit.key,
            },
            "passage": {
                "text_id": passage.text_id,
                "body": passage.body,
                "paragraphs": [list(p) for p in passage.paragraphs],
            },
            "suggestions": suggestions_for(unit, passage),
            "detected_findings": [f.to_json() for f in findings],
            "detected_categories": element_categories(findings),
            "annotation": record.to_json() if record else None,
            "revision": revision,
        }
        if record is not None:
            bundle["validation"] = _score_or_findings(record, unit)
        return bundle

    @app.put("/api/annotation/{mcq_id}")
    async def put_annotation(mcq_id: str, request: Request,
                             expected_revision: Optional[int] = Query(None)) -> dict:
        if mcq_id not in corpus.mcqs:
            raise HTTPException(status_code=404, detail=f"unknown MCQ {mcq_id!r}")
        raw = await request.json()
        try:
            record, revision = store.put(mcq_id, raw, expected_revision)
        except RevisionConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except SchemaError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        payload = _score_or_findings(record, corpus.mcqs[mcq_id])
        payload["revision"] = revision
        payload["record"] = record.to_json()
        return payload

    @app.post("/api/score")
    async def score_stateless(request: Request) -> dict:
        raw = await request.json()
        try:
            from .corpus_io import parse_annotation
            record = parse_annotation(raw, "posted record")
        except SchemaError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        mcq = corpus.mcqs.get(record.mcq_id)
        return _score_or_findings(record, mcq)

    @app.get("/api/report/{kind}")
    def report(kind: str) -> JSONResponse:
        reports = build_reports(corpus, store.records())
        extra = {"acceptable_texts": reports["acceptable_texts"],
                 "scorecards": reports["scorecards"]}
        if kind in reports:
            return JSONResponse(reports[kind])
        if kind in extra:
            return JSONResponse(extra[kind])
        raise HTTPException(
            status_code=404,
            detail=f"unknown report {kind!r}; one of {sorted(reports)}")

    static = static_dir if static_dir is not None else _STATIC_DIR
    if static.is_dir():
        app.mount("/", StaticFiles(directory=str(static), html=True),
                  name="workbench")

    return app


def serve(corpus: Corpus, store: AnnotationStore, port: int = 8377,
          host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(corpus, store), host=host, port=port,
                log_level="warning")
