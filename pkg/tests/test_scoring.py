"""Rubric table fidelity and scoring behaviour.

Expected point values are frozen from the published scoring scales; the
enumeration tests brute-force the whole table product.
"""

from __future__ import annotations

import itertools
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_mcq, make_record
from mcqlab.model import VocabularyError, points_to_number
from mcqlab.scoring import (
    INDETERMINATE,
    TOI_3TO1,
    IncompleteAnnotationError,
    enumerate_table_totals,
    resolve_alternatives_toi,
    resolve_multi_category,
    score_ic,
    score_tom,
    score_total,
    score_variable,
    select_pod_category,
    table_point_sets,
    tom_category,
    validate_complete,
)
from mcqlab.vocab import tables


# ---------------------------------------------------------------------------
# Per-variable table lookups
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("concept,points", [
    ("person", 1), ("animal", 1), ("place", 1), ("group", 1), ("thing", 1),
    ("amount", 2), ("time", 2), ("attribute", 2), ("action", 2),
    ("location", 2), ("type/kind", 2), ("procedure", 2), ("part", 2),
    ("manner", 3), ("goal", 3), ("purpose", 3), ("condition", 3),
    ("predicate adjective", 3), ("function", 3), ("alternative", 3),
    ("attempt", 3), ("sequence", 3), ("pronominal reference", 3),
    ("verification", 3), ("assertion", 3), ("problem", 3), ("solution", 3),
    ("role", 3), ("process", 3),
    ("cause", 4), ("reason", 4), ("result", 4), ("effect", 4),
    ("justification", 4), ("evidence", 4), ("similarity", 4), ("opinion", 4),
    ("explanation", 4), ("theme", 4), ("pattern", 4),
    ("equivalent", 5), ("difference", 5), ("definition", 5),
    ("advantage", 5), ("indeterminate", 5),
])
def test_toi_table(concept, points):
    assert score_variable("TOI", concept) == 2 * points


@pytest.mark.parametrize("alias,points", [
    ("proper names (people)", 1),
    ("proper names (published materials, names of events)", 1),
    ("contact details", 1),
    ("age", 2),
    ("prerequisite", 3),
    ("attitude", 4),
    ("recommendation", 4),
    ("piece of advice", 4),
    ("main idea", 4),
    ("purpose of the passage", 4),
    ("example", 5),
])
def test_toi_aliases(alias, points):
    assert score_variable("TOI", alias) == 2 * points


@pytest.mark.parametrize("concept", ["job", "profession", "position"])
def test_toi_context_dependent_rejected(concept):
    with pytest.raises(VocabularyError, match="context-dependent"):
        score_variable("TOI", concept)


@pytest.mark.parametrize("category,points", [
    ("no_distracting_information", 1),
    ("literal_match_different_paragraph", 1.5),
    ("synonymous_match_different_paragraph", 2),
    ("invited_inference_outside_key_paragraph", 3),
    ("one_distractor_same_paragraph", 4),
    ("two_or_more_distractors_same_paragraph", 5),
    ("inference_outside_text", 5),
])
def test_pod_table(category, points):
    assert score_variable("POD", category) == 2 * points


@pytest.mark.parametrize("category,points", [
    ("none", 0), ("addition", 1), ("counting", 1), ("subtraction", 2),
    ("multiplication", 3), ("division", 4), ("multiple", 5),
])
def test_toc_table(category, points):
    # one-by-one counting scores the same as a single addition
    assert score_variable("TOC", category) == 2 * points


@pytest.mark.parametrize("count,points", [(1, 0), (2, 1), (3, 2), (4, 3), (7, 3)])
def test_nphr_bands(count, points):
    assert score_variable("NPhr", count) == 2 * points


@pytest.mark.parametrize("count,points", [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (9, 3)])
def test_ni_bands(count, points):
    assert score_variable("NI", count) == 2 * points


def test_nit_npar_tables():
    assert score_variable("NIt", "specified") == 0
    assert score_variable("NIt", "unspecified") == 2
    assert score_variable("NPar", "within_paragraph") == 0
    assert score_variable("NPar", "between_paragraphs") == 2


def test_unknown_category_names_variable_and_value():
    with pytest.raises(VocabularyError, match="TOC.*'percentage'"):
        score_variable("TOC", "percentage")
    with pytest.raises(VocabularyError, match="TOI concept 'vibe'"):
        score_variable("TOI", "vibe")


def test_tables_are_closed():
    t = tables()
    assert set(t.toi_points.values()) == {2, 4, 6, 8, 10}
    assert sorted(p for _, p in t.tom_categories) == [1, 2, 3, 4, 5, 6, 8, 10]
    assert set(t.pod_points.values()) == {2, 3, 4, 6, 8, 10}
    for alias, target in t.toi_aliases.items():
        assert target in t.toi_points


# ---------------------------------------------------------------------------
# TOM relation matrix
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("tq,ta,points", [
    ("LM", "LM", 0.5),
    ("LM", "SM", 1),
    ("SM", "SM", 1.5),
    ("LM", "LLTI", 2),
    ("SM", "LLTI", 2.5),
    ("LLTI", "LLTI", 3),
    ("LM", "HLTI", 4),
    ("SM", "HLTI", 4),
    ("LLTI", "HLTI", 4),
])
def test_tom_table_rows(tq, ta, points):
    assert score_tom(tq, ta) == int(points * 2)
    assert score_tom(ta, tq) == int(points * 2)


def test_tom_symmetry_exhaustive():
    for a, b in itertools.product(("LM", "SM", "LLTI"), repeat=2):
        assert score_tom(a, b) == score_tom(b, a)


def test_tom_gen_overrides_pair():
    assert score_tom(None, None, gen=True) == 10
    assert score_tom("LM", "LM", gen=True) == 10


def test_tom_double_hlti_rejected():
    with pytest.raises(VocabularyError, match="GEN"):
        score_tom("HLTI", "HLTI")


def test_tom_unknown_relation():
    with pytest.raises(VocabularyError, match="T-A"):
        score_tom("LM", "fuzzy")


def test_tom_category_names():
    assert tom_category("LLTI", "LM") == "LM/LLTI"
    assert tom_category("SM", "HLTI") == "HLTI"
    assert tom_category(None, None, gen=True) == "GEN"


# ---------------------------------------------------------------------------
# TOI resolution over alternatives
# ---------------------------------------------------------------------------

def test_toi_unanimous():
    assert resolve_alternatives_toi(["person"] * 4) == "person"


def test_toi_two_two_split_is_indeterminate():
    assert resolve_alternatives_toi(["time", "time", "amount", "amount"]) == INDETERMINATE


def test_toi_four_distinct_is_indeterminate():
    assert resolve_alternatives_toi(["person", "time", "theme", "cause"]) == INDETERMINATE


def test_toi_three_one_split_is_flagged():
    assert resolve_alternatives_toi(["person", "person", "person", "time"]) == TOI_3TO1


def test_toi_resolution_applies_aliases():
    # "age" maps to amount, so amount+age pairs are unanimous after mapping
    assert resolve_alternatives_toi(["age", "amount", "age", "amount"]) == "amount"


# ---------------------------------------------------------------------------
# IC coupling with NPar
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("ic,npar,points", [
    ("compare", "within_paragraph", 0),
    ("compare", "between_paragraphs", 0),
    ("contrast", "within_paragraph", 1),
    ("contrast", "between_paragraphs", 0),
])
def test_score_ic(ic, npar, points):
    assert score_ic(ic, npar) == 2 * points


# ---------------------------------------------------------------------------
# POD selection and multi-category resolution
# ---------------------------------------------------------------------------

def test_pod_selects_highest():
    got = select_pod_category(
        ["literal_match_different_paragraph", "inference_outside_text"]
    )
    assert got == "inference_outside_text"


def test_pod_unanimous():
    got = select_pod_category(["no_distracting_information"] * 3)
    assert got == "no_distracting_information"


def test_pod_max_over_points_map():
    # independently: max over the points map of the two candidates
    t = tables()
    cands = ["one_distractor_same_paragraph", "two_or_more_distractors_same_paragraph"]
    expected = max(cands, key=lambda c: t.pod_points[c])
    assert select_pod_category(cands) == expected == "two_or_more_distractors_same_paragraph"


def test_pod_tie_later_row_wins():
    got = select_pod_category(
        ["inference_outside_text", "two_or_more_distractors_same_paragraph"]
    )
    assert got == "inference_outside_text"


def test_pod_empty_rejected():
    with pytest.raises(VocabularyError):
        select_pod_category([])


def test_resolve_multi_tom_keeps_highest():
    assert resolve_multi_category("TOM", ["LM", "SM"]) == "SM"


def test_resolve_multi_toi_keeps_lowest():
    assert resolve_multi_category("TOI", ["person", "role"]) == "person"


def test_resolve_multi_singleton():
    assert resolve_multi_category("TOC", ["division"]) == "division"


def test_resolve_multi_rejects_foreign_category():
    with pytest.raises(VocabularyError):
        resolve_multi_category("NPar", ["within_paragraph", "contrast"])


# ---------------------------------------------------------------------------
# Completeness validation
# ---------------------------------------------------------------------------

def test_validate_complete_ok():
    assert validate_complete(make_record()) == []


def test_validate_missing_toc():
    findings = validate_complete(make_record(toc=None))
    assert [f.variable for f in findings] == ["TOC"]
    assert findings[0].kind == "missing"


def test_validate_complex_key_implies_items():
    mcq = make_mcq(alternatives=("red", "blue", "both A and B", "green"), key="C")
    pods = {"A": "no_distracting_information", "B": "no_distracting_information",
            "D": "no_distracting_information"}
    findings = validate_complete(make_record(ni=1, pod_per_distractor=pods), mcq)
    assert any(f.variable == "NI" and f.kind == "inconsistent" for f in findings)
    assert validate_complete(make_record(ni=2, pod_per_distractor=pods), mcq) == []


def test_validate_all_of_the_above_implies_three_items():
    mcq = make_mcq(alternatives=("red", "blue", "green", "all of the above"), key="D")
    findings = validate_complete(make_record(ni=2), mcq)
    assert any(f.variable == "NI" for f in findings)


def test_validate_three_one_split_reported():
    rec = make_record(toi_concepts={"A": "person", "B": "person",
                                    "C": "person", "D": "time"})
    findings = validate_complete(rec)
    assert any(f.variable == "TOI" and f.kind == "inconsistent" for f in findings)


def test_validate_pod_for_key_label_flagged():
    mcq = make_mcq(key="A")
    rec = make_record(pod_per_distractor={"A": "no_distracting_information",
                                          "B": "no_distracting_information"})
    findings = validate_complete(rec, mcq)
    assert any(f.variable == "POD" and f.kind == "inconsistent" for f in findings)


# ---------------------------------------------------------------------------
# Totals
# ---------------------------------------------------------------------------

def test_all_minimum_record_scores_2_5():
    card = score_total(make_record())
    assert card.total == 2.5
    assert card.components_x2 == {
        "TOI": 2, "TOM": 1, "NPhr": 0, "NI": 0, "NIt": 0,
        "NPar": 0, "IC": 0, "POD": 2, "TOC": 0,
    }


def _maximal_record(**overrides):
    fields = dict(
        toi_concepts="indeterminate",
        tom_gen=True,
        nphr=4,
        ni=5,
        nit="unspecified",
        npar="between_paragraphs",
        ic="contrast",
        pod_per_distractor={"B": "inference_outside_text"},
        toc="multiple",
    )
    fields.update(overrides)
    return make_record(**fields)


def test_maximal_record_totals_28():
    # NPar and IC are mutually exclusive point sources for a real record:
    # contrast only scores within one paragraph, so the table-product
    # maximum of 29 is not reachable by any single record.
    assert score_total(_maximal_record()).total == 28
    assert score_total(_maximal_record(npar="within_paragraph")).total == 28


def test_maximal_record_without_toc():
    assert score_total(_maximal_record(toc="none")).total == 23


def test_score_total_is_pure():
    a = score_total(make_record(ni=3, toc="counting"))
    b = score_total(make_record(ni=3, toc="counting"))
    assert a == b


def test_score_total_incomplete_names_variables():
    with pytest.raises(IncompleteAnnotationError, match="NPhr"):
        score_total(make_record(nphr=None))


def test_score_total_rejects_3to1_split():
    rec = make_record(toi_concepts={"A": "person", "B": "person",
                                    "C": "person", "D": "time"})
    with pytest.raises(VocabularyError, match="3-to-1"):
        score_total(rec)


def test_scorecard_serialization_shape():
    card = score_total(make_record(tom_tq="SM", tom_ta="LLTI"))
    out = card.to_json()
    assert out["TOM"] == 2.5
    assert out["total"] == card.total
    assert list(out)[1:10] == ["TOI", "TOM", "NPhr", "NI", "NIt", "NPar",
                               "IC", "POD", "TOC"]


# ---------------------------------------------------------------------------
# Brute-force table enumeration
# ---------------------------------------------------------------------------

def test_enumeration_bounds_and_steps():
    start = time.perf_counter()
    totals = enumerate_table_totals()
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    assert min(totals) == 5      # 2.5 points
    assert max(totals) == 58     # 29 points
    # x2 representation: every total is a whole number of half-points
    assert all(isinstance(v, int) for v in totals)
    assert (min(totals) + max(totals)) / 2 / 2 == 15.75


def test_enumeration_without_toc():
    totals = enumerate_table_totals(include_toc=False)
    assert max(totals) == 48     # 24 points
    assert (min(totals) + max(totals)) / 2 / 2 == 13.25


def test_toi_tom_pod_share_of_difficulty():
    sets = table_point_sets()
    heavy = max(sets["TOI"]) + max(sets["TOM"]) + max(sets["POD"])
    assert heavy == 30           # 15 points
    assert abs(heavy / 58 * 100 - 51.7) <= 0.1
    assert abs(heavy / 48 * 100 - 62.5) <= 0.1


# ---------------------------------------------------------------------------
# Monotonicity property
# ---------------------------------------------------------------------------

_TOI_CONCEPTS = ["person", "amount", "manner", "cause", "equivalent"]
_POD_CATS = ["no_distracting_information", "literal_match_different_paragraph",
             "synonymous_match_different_paragraph",
             "invited_inference_outside_key_paragraph",
             "one_distractor_same_paragraph",
             "two_or_more_distractors_same_paragraph", "inference_outside_text"]


@st.composite
def complete_records(draw):
    tom = draw(st.sampled_from([("LM", "LM"), ("LM", "SM"), ("SM", "SM"),
                                ("LM", "LLTI"), ("SM", "LLTI"), ("LLTI", "LLTI"),
                                ("LM", "HLTI"), ("SM", "HLTI"), ("LLTI", "HLTI")]))
    return make_record(
        toi_concepts=draw(st.sampled_from(_TOI_CONCEPTS)),
        tom_tq=tom[0], tom_ta=tom[1],
        nphr=draw(st.integers(1, 6)),
        ni=draw(st.integers(1, 6)),
        nit=draw(st.sampled_from(["specified", "unspecified"])),
        npar=draw(st.sampled_from(["within_paragraph", "between_paragraphs"])),
        ic=draw(st.sampled_from(["compare", "contrast"])),
        pod_per_distractor={"B": draw(st.sampled_from(_POD_CATS))},
        toc=draw(st.sampled_from(["none", "addition", "counting", "subtraction",
                                  "multiplication", "division", "multiple"])),
    )


@given(complete_records())
@settings(max_examples=300)
def test_record_totals_within_theoretical_bounds(record):
    card = score_total(record)
    assert 5 <= card.total_x2 <= 58
    no_toc = card.total_x2 - card.components_x2["TOC"]
    assert no_toc <= 48


@given(complete_records(), st.sampled_from(["TOI", "POD", "TOC", "NPhr", "NI"]))
@settings(max_examples=300)
def test_single_variable_upgrade_moves_total_by_difference(record, variable):
    base = score_total(record)
    if variable == "TOI":
        upgraded = make_record(**{**_fields(record), "toi_concepts": "indeterminate"})
    elif variable == "POD":
        upgraded = make_record(**{**_fields(record),
                                  "pod_per_distractor": {"B": "inference_outside_text"}})
    elif variable == "TOC":
        upgraded = make_record(**{**_fields(record), "toc": "multiple"})
    elif variable == "NPhr":
        upgraded = make_record(**{**_fields(record), "nphr": 9})
    else:
        upgraded = make_record(**{**_fields(record), "ni": 9})
    up = score_total(upgraded)
    diff = up.components_x2[variable] - base.components_x2[variable]
    assert diff >= 0
    assert up.total_x2 - base.total_x2 == diff


def _fields(record):
    return dict(
        toi_concepts=record.toi_concepts, tom_tq=record.tom_tq,
        tom_ta=record.tom_ta, tom_gen=record.tom_gen, nphr=record.nphr,
        ni=record.ni, nit=record.nit, npar=record.npar, ic=record.ic,
        pod_per_distractor=record.pod_per_distractor, toc=record.toc,
    )


def test_points_rendering():
    assert points_to_number(27) == 13.5
    assert points_to_number(26) == 13
    assert isinstance(points_to_number(26), int)
