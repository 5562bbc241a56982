"""Command-line entry point.

Commands: ingest, lint, validate, score, filter, report, serve. Outputs
are deterministic (no timestamps) and streamed as line-delimited records
by default; ``--format table`` renders aligned text instead. Exit codes:
0 clean, 1 validation findings, 2 I/O or schema failure.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from .classify import suggestions_for
from .corpus_io import Corpus, load_annotations, load_corpus, save_annotations
from .errors import detect_mechanical_errors, element_categories
from .model import SchemaError
from .pipeline import (
    apply_quality_gate,
    build_reports,
    compare_to_reference,
    write_report_files,
)
from .scoring import score_total, validate_complete
from .store import AnnotationStore


def _emit(rows: Iterable[dict], fmt: str, out: Optional[Path]) -> None:
    """Write records as JSONL or an aligned table; atomic when file-bound."""
    rows = list(rows)
    if fmt == "table":
        if rows:
            keys = list(rows[0])
            widths = {k: max(len(k), *(len(str(r.get(k, ""))) for r in rows))
                      for k in keys}
            lines = ["  ".join(k.ljust(widths[k]) for k in keys)]
            lines += ["  ".join(str(r.get(k, "")).ljust(widths[k]) for k in keys)
                      for r in rows]
        else:
            lines = []
        text = "\n".join(lines) + ("\n" if lines else "")
    else:
        text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)
    if out is None:
        sys.stdout.write(text)
    else:
        tmp = out.with_suffix(out.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(out)


def _load(args) -> Corpus:
    return load_corpus(args.corpus)


def cmd_ingest(args) -> int:
    corpus = _load(args)
    rows = []
    for passage, unit in corpus.pairs():
        row = {"mcq_id": unit.mcq_id, "text_id": unit.text_id,
               "key": unit.key}
        row.update(suggestions_for(unit, passage))
        row.pop("format_evidence", None)
        rows.append(row)
    summary = {
        "mcq_id": "(summary)", "text_id": f"{len(corpus.passages)} texts",
        "key": f"{len(corpus.mcqs)} mcqs",
    }
    _emit(rows + [summary], args.format, args.out)
    return 0


def cmd_lint(args) -> int:
    corpus = _load(args)
    rows: List[dict] = []
    any_findings = False
    for passage, unit in corpus.pairs():
        findings = detect_mechanical_errors(unit, passage)
        if findings:
            any_findings = True
            rows.extend(f.to_json() for f in findings)
            categories = element_categories(findings)
            rows.append({"mcq_id": unit.mcq_id, "element": "(categories)",
                         "error_type": "", "severity": "",
                         "categories": categories})
    _emit(rows, args.format, args.out)
    return 1 if any_findings else 0


def _classification_warnings(corpus: Corpus, records) -> List[dict]:
    warnings = []
    for record in records:
        unit = corpus.mcqs[record.mcq_id]
        passage = corpus.passages[unit.text_id]
        suggested = suggestions_for(unit, passage)
        for attr, key in (("text_format", "text_format"),
                          ("membership", "membership"),
                          ("aspect", "aspect")):
            explicit = getattr(record, attr)
            if explicit is not None and explicit != suggested[key]:
                warnings.append({
                    "mcq_id": record.mcq_id, "kind": "warning",
                    "variable": key,
                    "message": (f"annotated {key} {explicit!r} disagrees with "
                                f"heuristic {suggested[key]!r} (annotation wins)"),
                })
    return warnings


def cmd_validate(args) -> int:
    corpus = _load(args)
    records = load_annotations(args.annotations, corpus)
    rows: List[dict] = []
    findings_present = False
    for record in records:
        unit = corpus.mcqs[record.mcq_id]
        for finding in validate_complete(record, unit):
            findings_present = True
            row = {"mcq_id": record.mcq_id}
            row.update(finding.to_json())
            rows.append(row)
    warnings = _classification_warnings(corpus, records)
    rows.extend(warnings)
    _emit(rows, args.format, args.out)
    if findings_present:
        return 1
    if warnings and args.strict:
        return 1
    return 0


def cmd_score(args) -> int:
    corpus = _load(args)
    records = load_annotations(args.annotations, corpus)
    rows: List[dict] = []
    failed = False
    for record in records:
        unit = corpus.mcqs[record.mcq_id]
        findings = validate_complete(record, unit)
        blockers = [f for f in findings if f.kind == "missing"]
        if blockers:
            failed = True
            for finding in blockers:
                row = {"mcq_id": record.mcq_id}
                row.update(finding.to_json())
                rows.append(row)
            continue
        rows.append(score_total(record).to_json())
    _emit(rows, args.format, args.out)
    return 1 if failed else 0


def cmd_filter(args) -> int:
    corpus = _load(args)
    records = load_annotations(args.annotations, corpus)
    gated, trace = apply_quality_gate(corpus, records)
    if args.out is not None:
        tmp = args.out.with_suffix(args.out.suffix + ".tmp")
        save_annotations(gated, tmp)
        tmp.replace(args.out)
    for stage in trace.stages:
        dropped = ", ".join(f"{k}={v}" for k, v in sorted(stage.dropped.items()))
        print(f"{stage.name}: {stage.mcqs} MCQs / {stage.texts} texts"
              + (f"  (dropped {dropped})" if dropped else ""))
    if args.check_reference:
        cards = [score_total(r) for r in gated]
        problems = compare_to_reference(corpus, records, gated, trace, cards)
        for problem in problems:
            print(f"reference mismatch: {problem}", file=sys.stderr)
        if problems:
            return 1
    return 0


def cmd_report(args) -> int:
    corpus = _load(args)
    records = load_annotations(args.annotations, corpus)
    reports = build_reports(corpus, records)
    out_dir = args.out or Path("reports")
    tmp_dir = out_dir.with_name(out_dir.name + ".tmp")
    if tmp_dir.exists():
        shutil.rmtree(tmp_dir)
    try:
        files = write_report_files(reports, tmp_dir)
    except Exception:
        shutil.rmtree(tmp_dir, ignore_errors=True)
        raise
    if out_dir.exists():
        shutil.rmtree(out_dir)
    tmp_dir.replace(out_dir)
    for f in files:
        print(out_dir / f.name)
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    corpus = _load(args)
    log_path = args.annotations or Path("annotations.jsonl")
    store = AnnotationStore(corpus, log_path)
    print(f"corpus: {len(corpus.mcqs)} MCQs on {len(corpus.passages)} texts")
    print(f"annotation log: {log_path}")
    print(f"listening on http://127.0.0.1:{args.port}")
    serve(corpus, store, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcqlab",
        description=("Lint RACE-format MCQ corpora, validate and score "
                     "annotation records, filter the high-quality subset, "
                     "and serve the annotation workbench."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, annotations_required=False):
        p.add_argument("--corpus", required=True, type=Path,
                       help="RACE-format corpus file or directory")
        p.add_argument("--annotations", required=annotations_required,
                       type=Path, help="line-delimited annotation records")
        p.add_argument("--out", type=Path, help="output file (default stdout)")
        p.add_argument("--format", choices=("records", "table"),
                       default="records")
        p.add_argument("--strict", action="store_true",
                       help="treat warnings as failures")

    p = sub.add_parser("ingest", help="load a corpus and print a summary")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("lint", help="run the mechanical error detectors")
    common(p)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("validate", help="check annotation completeness")
    common(p, annotations_required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score complete annotation records")
    common(p, annotations_required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("filter", help="apply the quality gate funnel")
    common(p, annotations_required=True)
    p.add_argument("--check-reference", action="store_true",
                   help="compare counts against the published expectations")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("report", help="write the analysis report artifacts")
    common(p, annotations_required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the local annotation server")
    common(p)
    p.add_argument("--port", type=int, default=8377)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
