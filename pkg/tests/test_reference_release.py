"""End-to-end pipeline run over the synthetic reference-scale release.

The generator shapes a 1045-text / 3498-MCQ corpus whose annotations walk
the whole funnel and reproduce the published corpus-wide counts, so this
is the full-scale integration check of loading, gating, scoring and
reporting.
"""

from __future__ import annotations

import time

import pytest

from mcqlab.corpus_io import load_annotations, load_corpus
from mcqlab.pipeline import (
    apply_quality_gate,
    bases_heatmap,
    compare_to_reference,
    difficulty_distribution,
    variable_distribution,
)
from mcqlab.scoring import score_total
from mcqlab.synthetic import build_reference_release


@pytest.fixture(scope="module")
def release(tmp_path_factory):
    out = tmp_path_factory.mktemp("release")
    corpus_path, annotations_path = build_reference_release(out)
    corpus = load_corpus(corpus_path)
    records = load_annotations(annotations_path, corpus)
    return corpus, records


def test_corpus_scale(release):
    corpus, records = release
    assert len(corpus.passages) == 1045
    assert len(corpus.mcqs) == 3498
    assert len(records) == 3498


def test_funnel_counts(release):
    corpus, records = release
    start = time.perf_counter()
    gated, trace = apply_quality_gate(corpus, records)
    elapsed = time.perf_counter() - start
    assert elapsed < 30

    by_name = {s.name: s for s in trace.stages}
    assert by_name["annotated"].mcqs == 3498
    assert by_name["annotated"].texts == 1045
    assert by_name["non_continuous_texts"].texts == 1041
    assert by_name["non_content_aspect"].mcqs == 3424
    assert by_name["non_content_aspect"].texts == 1038
    assert by_name["severe_problems"].mcqs == 1326
    assert by_name["severe_problems"].texts == 466
    assert by_name["partly_continuous_texts"].mcqs == 1181
    assert by_name["partly_continuous_texts"].texts == 412
    assert by_name["toi_3to1_split"].mcqs == 1181
    assert len(gated) == 1181


def test_difficulty_statistics(release):
    corpus, records = release
    gated, _ = apply_quality_gate(corpus, records)
    cards = [score_total(r) for r in gated]
    dist = difficulty_distribution(cards)
    assert abs(dist.mean - 13.09) <= 0.01
    assert dist.median == 13
    assert dist.mode == 14
    assert not dist.mode_tied
    assert dist.minimum >= 5
    assert dist.maximum <= 22


def test_variable_spot_counts(release):
    corpus, records = release
    gated, _ = apply_quality_gate(corpus, records)
    tom = variable_distribution(gated, "TOM")
    assert tom["LLTI/LLTI"] == 474
    assert tom["LM/LM"] + tom["LM/SM"] + tom["SM/SM"] < 100
    pod = variable_distribution(gated, "POD")
    assert pod["inference_outside_text"] == 518
    assert pod["two_or_more_distractors_same_paragraph"] == 310


def test_reference_comparison_clean(release):
    corpus, records = release
    gated, trace = apply_quality_gate(corpus, records)
    cards = [score_total(r) for r in gated]
    assert compare_to_reference(corpus, records, gated, trace, cards) == []


def test_bases_position_bias(release):
    corpus, records = release
    gated, _ = apply_quality_gate(corpus, records)
    heat = bases_heatmap(corpus, gated)
    a = heat["A"]
    # per-bucket density up to 30% dwarfs the rest
    assert sum(a[:30]) / 30 > 2 * sum(a[30:]) / 70
    d = heat["D"]
    assert sum(d[70:]) / 30 > 2 * sum(d[:70]) / 70
