"""The nine-variable difficulty rubric.

Total difficulty is the exact sum TOI + TOM + NPhr + NI + NIt + NPar + IC +
POD + TOC. All arithmetic is done in half-point integer units (see
``model.points_to_number`` for rendering), so totals never accumulate float
error. Assessment conventions implemented here:

* when several categories of one variable apply, the highest-scoring one is
  kept, except TOI where the lowest-scoring one is kept;
* the two TOM relations are symmetric: swapping T-Q and T-A never changes
  the points;
* the hardest distractor decides POD;
* contrast under IC earns its point only for within-paragraph inference
  (the between-paragraphs case is already paid by NPar). The underlying
  scale wording admits another reading; this coupling is the one the
  distribution analysis assumes, and it is frozen here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .model import (
    ALTERNATIVE_LABELS,
    AnnotationRecord,
    MCQUnit,
    Scorecard,
    VocabularyError,
)
from .vocab import ScoringTables, tables

TOI_3TO1 = "toi_3to1_split"
INDETERMINATE = "indeterminate"

# Key texts matching these patterns are "complex alternatives" built from
# other alternatives; they imply a minimum item count.
_COMPLEX_KEY_PATTERNS: Tuple[Tuple[str, int], ...] = (
    ("all of the above", 3),
    ("all the above", 3),
    ("both", 2),
)


class IncompleteAnnotationError(ValueError):
    """Raised when scoring a record that is missing rubric variables."""

    def __init__(self, mcq_id: str, findings: List["ValidationFinding"]) -> None:
        self.findings = findings
        names = ", ".join(f.variable for f in findings)
        super().__init__(f"{mcq_id}: annotation incomplete ({names})")


@dataclass(frozen=True)
class ValidationFinding:
    variable: str
    kind: str  # "missing" | "inconsistent"
    message: str

    def to_json(self) -> dict:
        return {"variable": self.variable, "kind": self.kind, "message": self.message}


def score_variable(variable: str, category, t: Optional[ScoringTables] = None) -> int:
    """Point lookup (half-units) for one variable's category.

    ``category`` is a concept name for TOI, a category name for NIt/NPar/
    POD/TOC, and a raw count for NPhr/NI (banded here).
    """
    t = t or tables()
    if variable == "TOI":
        return t.toi_points_of(category)
    if variable == "NPhr":
        return t.band_points(t.nphr_bands, _as_count(variable, category), variable)
    if variable == "NI":
        return t.band_points(t.ni_bands, _as_count(variable, category), variable)
    if variable == "NIt":
        return _lookup(t.nit_points, category, variable)
    if variable == "NPar":
        return _lookup(t.npar_points, category, variable)
    if variable == "POD":
        return _lookup(t.pod_points, category, variable)
    if variable == "TOC":
        return _lookup(t.toc_points, category, variable)
    raise VocabularyError(f"unknown or non-lookup variable {variable!r}")


def _lookup(table: Dict[str, int], category, variable: str) -> int:
    try:
        return table[category]
    except (KeyError, TypeError):
        raise VocabularyError(f"unknown {variable} category {category!r}") from None


def _as_count(variable: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise VocabularyError(f"{variable} expects an integer count >= 1, got {value!r}")
    return value


def score_tom(tq: Optional[str], ta: Optional[str], gen: bool = False,
              t: Optional[ScoringTables] = None) -> int:
    """TOM points (half-units) from the T-Q/T-A relation pair.

    ``gen`` (generating the interpretive framework) overrides the pair and
    scores the maximum. A pair containing HLTI scores 4 regardless of the
    other relation; both relations being HLTI without ``gen`` is not a row
    of the scale and is rejected.
    """
    t = t or tables()
    if gen:
        return t.tom_gen_x2
    for name, rel in (("T-Q", tq), ("T-A", ta)):
        if rel not in t.tom_relations:
            raise VocabularyError(f"unknown TOM {name} relation {rel!r}")
    if tq == "HLTI" and ta == "HLTI":
        raise VocabularyError(
            "both TOM relations are HLTI: mark the record as GEN instead"
        )
    if tq == "HLTI" or ta == "HLTI":
        return t.tom_hlti_x2
    return t.tom_pairs[frozenset((tq, ta))]


def tom_category(tq: Optional[str], ta: Optional[str], gen: bool = False) -> str:
    """Canonical category name for distribution reports, e.g. ``LLTI/LLTI``."""
    if gen:
        return "GEN"
    if tq == "HLTI" or ta == "HLTI":
        return "HLTI"
    order = {"LM": 0, "SM": 1, "LLTI": 2}
    lo, hi = sorted((tq, ta), key=order.__getitem__)
    return f"{lo}/{hi}"


def resolve_alternatives_toi(concepts: Sequence[str],
                             t: Optional[ScoringTables] = None) -> str:
    """Resolve the four alternatives' concepts to one TOI category.

    All four equal resolves to that concept. A 2+2 split or four distinct
    concepts is ``indeterminate`` (scores 5). A 3+1 split returns the
    :data:`TOI_3TO1` flag: such MCQs are excluded from difficulty analysis
    because the odd alternative can betray the key.
    """
    t = t or tables()
    if len(concepts) != 4:
        raise VocabularyError(f"expected 4 concepts, got {len(concepts)}")
    resolved = [t.resolve_toi_concept(c) for c in concepts]
    counts = sorted(
        (resolved.count(c) for c in set(resolved)), reverse=True
    )
    if counts == [4]:
        return resolved[0]
    if counts == [3, 1]:
        return TOI_3TO1
    return INDETERMINATE


def score_ic(ic: str, npar: str, t: Optional[ScoringTables] = None) -> int:
    """IC points (half-units). Contrast scores only within one paragraph."""
    t = t or tables()
    if ic not in t.ic_categories:
        raise VocabularyError(f"unknown IC category {ic!r}")
    if npar not in t.npar_points:
        raise VocabularyError(f"unknown NPar category {npar!r}")
    if ic == "contrast" and npar == "within_paragraph":
        return t.ic_row_points[1]
    return t.ic_row_points[0]


def select_pod_category(per_distractor: Iterable[str],
                        t: Optional[ScoringTables] = None) -> str:
    """Pick the hardest distractor's category.

    Maximizes points; ties on points resolve to the later table row. The
    literal annotated category is kept (never remapped to a same-points
    sibling).
    """
    t = t or tables()
    cats = list(per_distractor)
    if not cats:
        raise VocabularyError("POD selection needs at least one distractor category")
    for c in cats:
        if c not in t.pod_points:
            raise VocabularyError(f"unknown POD category {c!r}")
    return max(cats, key=lambda c: (t.pod_points[c], t.pod_row_index[c]))


def resolve_multi_category(variable: str, candidates: Sequence[str],
                           t: Optional[ScoringTables] = None) -> str:
    """Resolve several applicable categories of one variable to one.

    Every variable keeps the highest-scoring candidate except TOI, which
    keeps the lowest-scoring one (the assessment reflects the minimum
    skill needed). Ties keep the first candidate in input order.
    """
    t = t or tables()
    if not candidates:
        raise VocabularyError(f"no candidates for {variable}")
    if variable == "TOI":
        return min(candidates, key=lambda c: t.toi_points_of(c))
    if variable == "TOM":
        # Candidates here are single T-Q or T-A relations.
        order = {rel: i for i, rel in enumerate(t.tom_relations)}
        for c in candidates:
            if c not in order:
                raise VocabularyError(f"unknown TOM relation {c!r}")
        return max(candidates, key=order.__getitem__)
    pointers = {
        "NIt": lambda c: _lookup(t.nit_points, c, "NIt"),
        "NPar": lambda c: _lookup(t.npar_points, c, "NPar"),
        "IC": lambda c: t.ic_row_points[1] if c == "contrast" else t.ic_row_points[0],
        "POD": lambda c: _lookup(t.pod_points, c, "POD"),
        "TOC": lambda c: _lookup(t.toc_points, c, "TOC"),
    }
    if variable not in pointers:
        raise VocabularyError(f"resolve_multi_category: unknown variable {variable!r}")
    points = pointers[variable]
    for c in candidates:
        points(c)  # vocabulary check
    return max(candidates, key=points)


def resolved_toi(record: AnnotationRecord, t: Optional[ScoringTables] = None) -> str:
    """The record's TOI category: a single concept, indeterminate, or the
    3-to-1 exclusion flag."""
    t = t or tables()
    if isinstance(record.toi_concepts, str):
        return t.resolve_toi_concept(record.toi_concepts)
    if isinstance(record.toi_concepts, dict):
        missing = [l for l in ALTERNATIVE_LABELS if l not in record.toi_concepts]
        if missing:
            raise VocabularyError(f"TOI concepts missing for alternatives {missing}")
        return resolve_alternatives_toi(
            [record.toi_concepts[l] for l in ALTERNATIVE_LABELS], t
        )
    raise VocabularyError("TOI concepts absent")


def implied_minimum_items(key_text: str) -> Optional[int]:
    """Minimum NI implied by a complex-alternative key ("both A and B" etc.)."""
    lowered = key_text.lower()
    for pattern, minimum in _COMPLEX_KEY_PATTERNS:
        if pattern == "both":
            if "both" in lowered and " and " in lowered:
                return minimum
        elif pattern in lowered:
            return minimum
    return None


def validate_complete(record: AnnotationRecord,
                      mcq: Optional[MCQUnit] = None,
                      t: Optional[ScoringTables] = None) -> List[ValidationFinding]:
    """Report everything that still blocks or taints scoring.

    Returns an empty list iff the record is assessed under every variable
    and internally consistent. ``missing`` findings block scoring;
    ``inconsistent`` findings flag suspect values but do not block. NI
    consistency against complex-alternative keys is only checked when the
    MCQ unit is supplied.
    """
    t = t or tables()
    findings: List[ValidationFinding] = []

    def missing(variable: str, message: str) -> None:
        findings.append(ValidationFinding(variable, "missing", message))

    if record.toi_concepts is None:
        missing("TOI", "TOI missing")
    else:
        try:
            if resolved_toi(record, t) == TOI_3TO1:
                findings.append(ValidationFinding(
                    "TOI", "inconsistent",
                    "3-to-1 concept split: MCQ is excluded from difficulty analysis",
                ))
        except VocabularyError as exc:
            missing("TOI", str(exc))

    if record.tom_gen:
        pass
    elif record.tom_tq is None or record.tom_ta is None:
        missing("TOM", "TOM missing (need both T-Q and T-A relations, or GEN)")
    else:
        try:
            score_tom(record.tom_tq, record.tom_ta, record.tom_gen, t)
        except VocabularyError as exc:
            missing("TOM", str(exc))

    if record.nphr is None:
        missing("NPhr", "NPhr missing")
    elif not isinstance(record.nphr, int) or record.nphr < 1:
        missing("NPhr", f"NPhr must be an integer count >= 1, got {record.nphr!r}")

    if record.ni is None:
        missing("NI", "NI missing")
    elif not isinstance(record.ni, int) or record.ni < 1:
        missing("NI", f"NI must be an integer count >= 1, got {record.ni!r}")
    elif mcq is not None:
        floor = implied_minimum_items(mcq.key_text)
        if floor is not None and record.ni < floor:
            findings.append(ValidationFinding(
                "NI", "inconsistent",
                f"key {mcq.key_text!r} is a complex alternative implying NI >= "
                f"{floor}, but NI = {record.ni}",
            ))

    for variable, value, table in (
        ("NIt", record.nit, t.nit_points),
        ("NPar", record.npar, t.npar_points),
        ("TOC", record.toc, t.toc_points),
    ):
        if value is None:
            missing(variable, f"{variable} missing")
        elif value not in table:
            missing(variable, f"unknown {variable} category {value!r}")

    if record.ic is None:
        missing("IC", "IC missing")
    elif record.ic not in t.ic_categories:
        missing("IC", f"unknown IC category {record.ic!r}")

    if not record.pod_per_distractor:
        missing("POD", "POD missing (no per-distractor categories)")
    else:
        for label, cat in record.pod_per_distractor.items():
            if cat not in t.pod_points:
                missing("POD", f"unknown POD category {cat!r} for distractor {label}")
        if mcq is not None:
            extraneous = [
                l for l in record.pod_per_distractor
                if l == mcq.key or l not in ALTERNATIVE_LABELS
            ]
            if extraneous:
                findings.append(ValidationFinding(
                    "POD", "inconsistent",
                    f"POD categories given for non-distractor labels {extraneous}",
                ))

    return findings


def score_total(record: AnnotationRecord,
                t: Optional[ScoringTables] = None) -> Scorecard:
    """Score a complete record. Pure: identical records yield identical
    scorecards. Raises :class:`IncompleteAnnotationError` when variables are
    missing and :class:`VocabularyError` on a 3-to-1 TOI split."""
    t = t or tables()
    blockers = [f for f in validate_complete(record, None, t) if f.kind == "missing"]
    if blockers:
        raise IncompleteAnnotationError(record.mcq_id, blockers)

    toi_cat = resolved_toi(record, t)
    if toi_cat == TOI_3TO1:
        raise VocabularyError(
            f"{record.mcq_id}: 3-to-1 TOI split cannot be scored (excluded)"
        )

    components = {
        "TOI": t.toi_points[toi_cat],
        "TOM": score_tom(record.tom_tq, record.tom_ta, record.tom_gen, t),
        "NPhr": t.band_points(t.nphr_bands, record.nphr, "NPhr"),
        "NI": t.band_points(t.ni_bands, record.ni, "NI"),
        "NIt": t.nit_points[record.nit],
        "NPar": t.npar_points[record.npar],
        "IC": score_ic(record.ic, record.npar, t),
        "POD": t.pod_points[select_pod_category(record.pod_per_distractor.values(), t)],
        "TOC": t.toc_points[record.toc],
    }
    return Scorecard(mcq_id=record.mcq_id, components_x2=components)


def table_point_sets(t: Optional[ScoringTables] = None) -> Dict[str, List[int]]:
    """Distinct point values (half-units) per variable, straight off the
    tables. IC contributes its two table rows here, independent of NPar."""
    t = t or tables()
    return {
        "TOI": sorted(set(t.toi_points.values())),
        "TOM": sorted({p for _, p in t.tom_categories}),
        "NPhr": sorted({p for _, _, _, p in t.nphr_bands}),
        "NI": sorted({p for _, _, _, p in t.ni_bands}),
        "NIt": sorted(set(t.nit_points.values())),
        "NPar": sorted(set(t.npar_points.values())),
        "IC": sorted(set(t.ic_row_points)),
        "POD": sorted(set(t.pod_points.values())),
        "TOC": sorted(set(t.toc_points.values())),
    }


def enumerate_table_totals(include_toc: bool = True,
                           t: Optional[ScoringTables] = None) -> List[int]:
    """Every achievable total (half-units) over the product of the per-variable
    tables. This is the brute-force check that the scale only produces
    half-point steps within its theoretical bounds."""
    sets = table_point_sets(t)
    names = list(sets)
    if not include_toc:
        names.remove("TOC")
    totals = {0}
    for name in names:
        totals = {base + p for base in totals for p in sets[name]}
    return sorted(totals)
