"""Corpus-level analysis: the quality-gate funnel, difficulty and
per-variable distributions, the problem-category heatmap, and the
bases-position bucket heatmap.

The gate operates on annotated MCQs only: quality is established by
annotation, so unannotated units are reported separately rather than
passed through. All classification inputs come from the records
(explicit fields or exclusion flags); heuristic suggestions never decide
an exclusion.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .corpus_io import Corpus
from .errors import aggregate_category, finding_from_mark
from .model import AnnotationRecord, Scorecard, Span, SpanError, points_to_number
from .scoring import TOI_3TO1, resolved_toi, score_total, tom_category, select_pod_category
from .vocab import ScoringTables, tables

GATE_STAGES = (
    "non_continuous_texts",
    "non_content_aspect",
    "severe_problems",
    "partly_continuous_texts",
    "toi_3to1_split",
)

_UNIT_ELEMENT_PREFIXES = ("question", "alternative", "alternatives", "interaction")


@dataclass(frozen=True)
class GateStage:
    name: str
    mcqs: int
    texts: int
    dropped: Dict[str, int]

    def to_json(self) -> dict:
        return {"stage": self.name, "mcqs": self.mcqs, "texts": self.texts,
                "dropped": dict(self.dropped)}


@dataclass
class GateTrace:
    stages: List[GateStage] = field(default_factory=list)
    unannotated_mcqs: int = 0

    def stage(self, name: str) -> GateStage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "stages": [s.to_json() for s in self.stages],
            "unannotated_mcqs": self.unannotated_mcqs,
        }


def text_format_of(text_id: str, records_by_text: Dict[str, List[AnnotationRecord]]) -> Optional[str]:
    for record in records_by_text.get(text_id, []):
        if record.text_format is not None:
            return record.text_format
    return None


def _element_group(element: str) -> str:
    return element.split(":", 1)[0]


def text_category(record: AnnotationRecord) -> str:
    marks = [m for m in record.error_marks if _element_group(m.element) == "text"]
    return aggregate_category(finding_from_mark(record.mcq_id, m) for m in marks)


def unit_category(record: AnnotationRecord) -> str:
    marks = [m for m in record.error_marks
             if _element_group(m.element) in _UNIT_ELEMENT_PREFIXES]
    return aggregate_category(finding_from_mark(record.mcq_id, m) for m in marks)


def _is_3to1(record: AnnotationRecord, t: ScoringTables) -> bool:
    if "toi_3to1_split" in record.exclusion_flags:
        return True
    if isinstance(record.toi_concepts, dict):
        try:
            return resolved_toi(record, t) == TOI_3TO1
        except Exception:
            return False
    return False


def apply_quality_gate(corpus: Corpus, records: Sequence[AnnotationRecord]
                       ) -> Tuple[List[AnnotationRecord], GateTrace]:
    """Run the staged exclusion funnel over the annotated MCQs.

    Stage order: non-continuous (and mixed) texts, non-content aspects,
    severe problems in any element, partly-continuous texts, 3-to-1 TOI
    splits. Each stage's output is a subset of its input and the trace
    records what was dropped and why.
    """
    t = tables()
    records_by_text: Dict[str, List[AnnotationRecord]] = {}
    for record in records:
        text_id = corpus.mcqs[record.mcq_id].text_id
        records_by_text.setdefault(text_id, []).append(record)

    def texts_of(recs: Iterable[AnnotationRecord]) -> int:
        return len({corpus.mcqs[r.mcq_id].text_id for r in recs})

    trace = GateTrace(unannotated_mcqs=len(corpus.mcqs) - len(records))
    current = list(records)
    trace.stages.append(GateStage("annotated", len(current), texts_of(current), {}))

    def run_stage(name: str, reason_of) -> None:
        nonlocal current
        kept: List[AnnotationRecord] = []
        dropped: Dict[str, int] = {}
        for record in current:
            reason = reason_of(record)
            if reason is None:
                kept.append(record)
            else:
                dropped[reason] = dropped.get(reason, 0) + 1
        current = kept
        trace.stages.append(GateStage(name, len(current), texts_of(current), dropped))

    def non_continuous(record: AnnotationRecord) -> Optional[str]:
        if "non_continuous_text" in record.exclusion_flags:
            return "non_continuous_text"
        fmt = text_format_of(corpus.mcqs[record.mcq_id].text_id, records_by_text)
        if fmt == "non_continuous":
            return "non_continuous_text"
        if fmt == "mixed":
            return "mixed_text"
        return None

    def non_content(record: AnnotationRecord) -> Optional[str]:
        if "non_content_aspect" in record.exclusion_flags:
            return "non_content_aspect"
        if record.aspect in ("structure", "vocabulary"):
            return f"{record.aspect}_aspect"
        return None

    def severe(record: AnnotationRecord) -> Optional[str]:
        if "severe_problem" in record.exclusion_flags:
            return "severe_problem_flag"
        if text_category(record) == "unacceptable":
            return "unacceptable_text"
        if unit_category(record) == "unacceptable":
            return "unacceptable_unit"
        return None

    def partly(record: AnnotationRecord) -> Optional[str]:
        if "partly_continuous_text" in record.exclusion_flags:
            return "partly_continuous_text"
        fmt = text_format_of(corpus.mcqs[record.mcq_id].text_id, records_by_text)
        if fmt == "partly_continuous":
            return "partly_continuous_text"
        return None

    def split_3to1(record: AnnotationRecord) -> Optional[str]:
        return "toi_3to1_split" if _is_3to1(record, t) else None

    run_stage("non_continuous_texts", non_continuous)
    run_stage("non_content_aspect", non_content)
    run_stage("severe_problems", severe)
    run_stage("partly_continuous_texts", partly)
    run_stage("toi_3to1_split", split_3to1)
    return current, trace


# ---------------------------------------------------------------------------
# Difficulty distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DifficultyDistribution:
    """Histogram over half-open unit bins plus summary statistics.

    Bin ``n`` counts totals in ``[n, n+1)``. Statistics are None for an
    empty input (undefined, never defaulted). ``mode`` is the smallest bin
    among tied maxima; ``mode_tied`` says whether a tie occurred.
    """

    histogram: Dict[int, int]
    count: int
    mean: Optional[float]
    median: Optional[float]
    mode: Optional[int]
    mode_tied: bool
    minimum: Optional[float]
    maximum: Optional[float]

    def to_json(self) -> dict:
        return {
            "bins": [{"bin": b, "count": c} for b, c in self.histogram.items()],
            "count": self.count,
            "mean": self.mean,
            "median": self.median,
            "mode": self.mode,
            "mode_tied": self.mode_tied,
            "min": self.minimum,
            "max": self.maximum,
        }


def difficulty_distribution(scorecards: Sequence[Scorecard]) -> DifficultyDistribution:
    if not scorecards:
        return DifficultyDistribution({}, 0, None, None, None, False, None, None)
    totals_x2 = sorted(card.total_x2 for card in scorecards)
    bins: Dict[int, int] = {}
    lo_bin, hi_bin = totals_x2[0] // 2, totals_x2[-1] // 2
    for b in range(lo_bin, hi_bin + 1):
        bins[b] = 0
    for v in totals_x2:
        bins[v // 2] += 1
    top = max(bins.values())
    tied = [b for b, c in bins.items() if c == top]
    median_x2 = statistics.median(totals_x2)
    return DifficultyDistribution(
        histogram=bins,
        count=len(totals_x2),
        mean=sum(totals_x2) / (2 * len(totals_x2)),
        median=float(median_x2) / 2,
        mode=min(tied),
        mode_tied=len(tied) > 1,
        minimum=points_to_number(totals_x2[0]),
        maximum=points_to_number(totals_x2[-1]),
    )


# ---------------------------------------------------------------------------
# Per-variable distributions
# ---------------------------------------------------------------------------

def _variable_vocabulary(variable: str, t: ScoringTables) -> List[str]:
    if variable == "TOI":
        concepts = sorted(t.toi_points, key=lambda c: t.toi_points[c])
        # stable within a band: keep the table order
        order = {c: i for i, c in enumerate(t.toi_points)}
        return sorted(concepts, key=lambda c: (t.toi_points[c], order[c]))
    if variable == "TOM":
        return [name for name, _ in t.tom_categories]
    if variable == "NPhr":
        return [label for label, _, _, _ in t.nphr_bands]
    if variable == "NI":
        return [label for label, _, _, _ in t.ni_bands]
    if variable == "NIt":
        return list(t.nit_points)
    if variable == "NPar":
        return list(t.npar_points)
    if variable == "IC":
        return list(t.ic_categories)
    if variable == "POD":
        return [name for name, _ in t.pod_rows]
    if variable == "TOC":
        return sorted(t.toc_points, key=lambda c: (t.toc_points[c],
                                                   list(t.toc_points).index(c)))
    raise KeyError(variable)


def record_category(record: AnnotationRecord, variable: str,
                    t: Optional[ScoringTables] = None) -> Optional[str]:
    """The category a record falls into for one variable, or None if that
    variable is not annotated (or not resolvable) on the record."""
    t = t or tables()
    try:
        if variable == "TOI":
            cat = resolved_toi(record, t)
            return None if cat == TOI_3TO1 else cat
        if variable == "TOM":
            if record.tom_gen:
                return "GEN"
            if record.tom_tq is None or record.tom_ta is None:
                return None
            return tom_category(record.tom_tq, record.tom_ta, record.tom_gen)
        if variable == "NPhr":
            return None if record.nphr is None else t.band_label(t.nphr_bands, record.nphr, "NPhr")
        if variable == "NI":
            return None if record.ni is None else t.band_label(t.ni_bands, record.ni, "NI")
        if variable == "NIt":
            return record.nit
        if variable == "NPar":
            return record.npar
        if variable == "IC":
            return record.ic
        if variable == "POD":
            if not record.pod_per_distractor:
                return None
            return select_pod_category(record.pod_per_distractor.values(), t)
        if variable == "TOC":
            return record.toc
    except Exception:
        return None
    raise KeyError(variable)


def variable_distribution(records: Sequence[AnnotationRecord], variable: str
                          ) -> Dict[str, int]:
    """Exact per-category counts, every vocabulary category present,
    ordered by points (table order within ties)."""
    t = tables()
    counts = {category: 0 for category in _variable_vocabulary(variable, t)}
    for record in records:
        category = record_category(record, variable, t)
        if category is not None:
            counts[category] += 1
    return counts


# ---------------------------------------------------------------------------
# Bases buckets and heatmap
# ---------------------------------------------------------------------------

def bases_bucket_map(text_length: int, span: Span) -> Set[int]:
    """Buckets (0-99, each 1% of characters) covered by a basis span.

    ``bucket_of(c) = floor(c*100/L)`` clamped to 99, applied to every
    character in ``[start, end)``; the result is the contiguous bucket
    interval between the first and last covered character.
    """
    if text_length < 1:
        raise SpanError(f"text length must be >= 1, got {text_length}")
    if not (0 <= span.start < span.end <= text_length):
        raise SpanError(
            f"span [{span.start}, {span.end}) out of range for length {text_length}"
        )

    def bucket_of(c: int) -> int:
        return min(c * 100 // text_length, 99)

    return set(range(bucket_of(span.start), bucket_of(span.end - 1) + 1))


def bases_heatmap(corpus: Corpus, records: Sequence[AnnotationRecord]
                  ) -> Dict[str, List[int]]:
    """Superposition of basis bucket indicators per alternative label.

    Every basis span contributes its own indicator vector, including
    several spans for the same alternative of one MCQ.
    """
    vectors: Dict[str, List[int]] = {label: [0] * 100 for label in "ABCD"}
    for record in records:
        text_id = corpus.mcqs[record.mcq_id].text_id
        length = len(corpus.passages[text_id].body)
        for basis in record.bases:
            for bucket in bases_bucket_map(length, basis.span):
                vectors[basis.label][bucket] += 1
    return vectors


# ---------------------------------------------------------------------------
# Problem-category heatmap and error counts
# ---------------------------------------------------------------------------

ACCEPTABILITY = ("acceptable", "mainly_acceptable", "partially_acceptable",
                 "unacceptable")


def problem_heatmap(records: Sequence[AnnotationRecord]) -> Dict[str, Dict[str, int]]:
    """MCQ counts by (text category, unit category)."""
    grid = {t: {u: 0 for u in ACCEPTABILITY} for t in ACCEPTABILITY}
    for record in records:
        grid[text_category(record)][unit_category(record)] += 1
    return grid


def error_mcq_counts(records: Sequence[AnnotationRecord],
                     element_group: Optional[str] = None) -> Dict[str, int]:
    """Number of MCQs carrying at least one mark of each error type,
    optionally restricted to one element group (text/question/alternative/
    interaction)."""
    counts: Dict[str, int] = {}
    for record in records:
        seen = set()
        for mark in record.error_marks:
            group = _element_group(mark.element)
            if group == "alternatives":
                group = "alternative"
            if element_group is not None and group != element_group:
                continue
            seen.add(mark.error_type)
        for error_type in seen:
            counts[error_type] = counts.get(error_type, 0) + 1
    return dict(sorted(counts.items()))


def acceptable_text_count(corpus: Corpus, records: Sequence[AnnotationRecord]) -> int:
    """Distinct texts whose text element carries no problem marks at all."""
    worst: Dict[str, bool] = {}
    for record in records:
        text_id = corpus.mcqs[record.mcq_id].text_id
        clean = text_category(record) == "acceptable"
        worst[text_id] = worst.get(text_id, True) and clean
    return sum(1 for clean in worst.values() if clean)


# ---------------------------------------------------------------------------
# Reference expectations
# ---------------------------------------------------------------------------

def reference_expectations() -> dict:
    ref = resources.files("mcqlab").joinpath("data/reference_expectations.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def compare_to_reference(corpus: Corpus,
                         records: Sequence[AnnotationRecord],
                         gated: Sequence[AnnotationRecord],
                         trace: GateTrace,
                         scorecards: Sequence[Scorecard]) -> List[str]:
    """Check the published corpus-wide counts; returns human-readable
    mismatch lines (empty means everything matches)."""
    expected = reference_expectations()
    problems: List[str] = []

    for stage_name, want in expected["funnel"].items():
        try:
            stage = trace.stage(stage_name)
        except KeyError:
            problems.append(f"funnel stage {stage_name!r} missing from trace")
            continue
        for key, value in want.items():
            got = getattr(stage, key)
            if got != value:
                problems.append(
                    f"funnel {stage_name}.{key}: expected {value}, got {got}")

    # the §5.1.3-style error analysis runs over the content-based set
    content_stage: List[AnnotationRecord] = _records_at_stage(
        corpus, records, "non_content_aspect")
    for group, wanted in expected["error_mcq_counts"].items():
        got_counts = error_mcq_counts(content_stage, group)
        for error_type, value in wanted.items():
            got = got_counts.get(error_type, 0)
            if got != value:
                problems.append(
                    f"error count {group}/{error_type}: expected {value}, got {got}")

    acc = expected["acceptability"]
    grid = problem_heatmap(content_stage)
    fully = grid["acceptable"]["acceptable"]
    if fully != acc["fully_acceptable_mcqs"]:
        problems.append(
            f"fully acceptable MCQs: expected {acc['fully_acceptable_mcqs']}, got {fully}")
    clean_texts = acceptable_text_count(corpus, content_stage)
    if clean_texts != acc["acceptable_texts"]:
        problems.append(
            f"acceptable texts: expected {acc['acceptable_texts']}, got {clean_texts}")

    for variable, wanted in expected["variable_counts"].items():
        got_counts = variable_distribution(gated, variable)
        for category, value in wanted.items():
            if got_counts.get(category, 0) != value:
                problems.append(
                    f"{variable} count {category}: expected {value}, "
                    f"got {got_counts.get(category, 0)}")

    diff = expected["difficulty"]
    dist = difficulty_distribution(scorecards)
    if dist.count == 0:
        problems.append("difficulty distribution empty")
        return problems
    if abs(dist.mean - diff["mean"]) > diff["mean_tolerance"]:
        problems.append(f"difficulty mean: expected {diff['mean']}, got {dist.mean:.4f}")
    if dist.median != diff["median"]:
        problems.append(f"difficulty median: expected {diff['median']}, got {dist.median}")
    if dist.mode != diff["mode"]:
        problems.append(f"difficulty mode: expected {diff['mode']}, got {dist.mode}")
    if dist.minimum < diff["min_at_least"]:
        problems.append(f"difficulty min {dist.minimum} below {diff['min_at_least']}")
    if dist.maximum > diff["max_at_most"]:
        problems.append(f"difficulty max {dist.maximum} above {diff['max_at_most']}")
    return problems


def _records_at_stage(corpus: Corpus, records: Sequence[AnnotationRecord],
                      stage_name: str) -> List[AnnotationRecord]:
    """Re-run the gate and return the survivors right after a given stage."""
    kept, _ = apply_quality_gate(corpus, records)
    if stage_name == GATE_STAGES[-1]:
        return kept
    # replay: run the gate but stop early
    t = tables()
    current = list(records)
    records_by_text: Dict[str, List[AnnotationRecord]] = {}
    for record in records:
        records_by_text.setdefault(corpus.mcqs[record.mcq_id].text_id, []).append(record)

    def fmt(record: AnnotationRecord) -> Optional[str]:
        return text_format_of(corpus.mcqs[record.mcq_id].text_id, records_by_text)

    stage_filters = {
        "non_continuous_texts": lambda r: not (
            "non_continuous_text" in r.exclusion_flags
            or fmt(r) in ("non_continuous", "mixed")),
        "non_content_aspect": lambda r: not (
            "non_content_aspect" in r.exclusion_flags
            or r.aspect in ("structure", "vocabulary")),
        "severe_problems": lambda r: not (
            "severe_problem" in r.exclusion_flags
            or text_category(r) == "unacceptable"
            or unit_category(r) == "unacceptable"),
        "partly_continuous_texts": lambda r: not (
            "partly_continuous_text" in r.exclusion_flags
            or fmt(r) == "partly_continuous"),
        "toi_3to1_split": lambda r: not _is_3to1(r, t),
    }
    for name in GATE_STAGES:
        current = [r for r in current if stage_filters[name](r)]
        if name == stage_name:
            return current
    raise KeyError(stage_name)


# ---------------------------------------------------------------------------
# Report artifacts
# ---------------------------------------------------------------------------

REPORT_KINDS = ("gate_trace", "difficulty", "variables", "bases_heatmap",
                "problem_heatmap", "error_counts")


def build_reports(corpus: Corpus, records: Sequence[AnnotationRecord]) -> dict:
    """All machine-readable report payloads for one corpus+annotation set."""
    gated, trace = apply_quality_gate(corpus, records)
    scorecards = [score_total(r) for r in gated]
    content_stage = _records_at_stage(corpus, records, "non_content_aspect")
    return {
        "gate_trace": trace.to_json(),
        "difficulty": difficulty_distribution(scorecards).to_json(),
        "variables": {
            variable: variable_distribution(gated, variable)
            for variable in ("TOI", "TOM", "NPhr", "NI", "NIt", "NPar",
                             "IC", "POD", "TOC")
        },
        "bases_heatmap": bases_heatmap(corpus, gated),
        "problem_heatmap": problem_heatmap(content_stage),
        "error_counts": {
            group: error_mcq_counts(content_stage, group)
            for group in ("text", "question", "alternative", "interaction")
        },
        "acceptable_texts": acceptable_text_count(corpus, content_stage),
        "scorecards": [card.to_json() for card in scorecards],
    }


def _tsv(rows: Iterable[Sequence]) -> str:
    return "\n".join("\t".join(str(v) for v in row) for row in rows) + "\n"


def write_report_files(reports: dict, out_dir: "str | Path") -> List[Path]:
    """Write reports as JSON plus delimited-text tables. Deterministic:
    identical payloads produce byte-identical files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    def dump(name: str, payload) -> None:
        p = out / f"{name}.json"
        p.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                     encoding="utf-8")
        written.append(p)

    dump("gate_trace", reports["gate_trace"])
    dump("difficulty", reports["difficulty"])
    dump("variables", reports["variables"])
    dump("bases_heatmap", reports["bases_heatmap"])
    dump("problem_heatmap", reports["problem_heatmap"])
    dump("error_counts", reports["error_counts"])
    dump("scorecards", reports["scorecards"])

    trace_rows = [("stage", "mcqs", "texts")]
    for stage in reports["gate_trace"]["stages"]:
        trace_rows.append((stage["stage"], stage["mcqs"], stage["texts"]))
    (out / "gate_trace.tsv").write_text(_tsv(trace_rows), encoding="utf-8")
    written.append(out / "gate_trace.tsv")

    hist_rows = [("bin", "count")]
    for entry in reports["difficulty"]["bins"]:
        hist_rows.append((entry["bin"], entry["count"]))
    (out / "difficulty_histogram.tsv").write_text(_tsv(hist_rows), encoding="utf-8")
    written.append(out / "difficulty_histogram.tsv")

    for variable, counts in reports["variables"].items():
        rows = [("category", "count")] + list(counts.items())
        p = out / f"variable_{variable}.tsv"
        p.write_text(_tsv(rows), encoding="utf-8")
        written.append(p)

    heat_rows = [("label",) + tuple(range(100))]
    for label in "ABCD":
        heat_rows.append((label,) + tuple(reports["bases_heatmap"][label]))
    (out / "bases_heatmap.tsv").write_text(_tsv(heat_rows), encoding="utf-8")
    written.append(out / "bases_heatmap.tsv")

    grid = reports["problem_heatmap"]
    prob_rows = [("text_category",) + ACCEPTABILITY]
    for t_cat in ACCEPTABILITY:
        prob_rows.append((t_cat,) + tuple(grid[t_cat][u] for u in ACCEPTABILITY))
    (out / "problem_heatmap.tsv").write_text(_tsv(prob_rows), encoding="utf-8")
    written.append(out / "problem_heatmap.tsv")

    return written
