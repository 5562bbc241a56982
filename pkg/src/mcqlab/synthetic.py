"""Deterministic synthetic corpora and annotation releases.

Two builders:

* :func:`build_demo_corpus` - a handful of clean articles for trying the
  CLI and the annotation workbench;
* :func:`build_reference_release` - a full-scale corpus plus annotations
  shaped so the whole analysis reproduces the published corpus-wide
  numbers exactly (funnel stage counts, error spot counts, difficulty
  statistics, bases position bias). It exists to exercise the pipeline
  end to end at realistic scale; it is generated data, not the released
  annotations.

Everything is seeded; the same seed always yields byte-identical files.

Usage: ``python -m mcqlab.synthetic OUT_DIR [--demo]``
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus_io import Corpus, corpus_record, load_annotations, load_corpus
from .model import AnnotationRecord, Basis, ErrorMark, MCQUnit, Span, TextPassage

# ---------------------------------------------------------------------------
# Text generation
# ---------------------------------------------------------------------------

_SUBJECTS = (
    "The young teacher", "A local farmer", "The museum guide", "An old sailor",
    "The village doctor", "A curious student", "The market trader",
    "The town librarian", "A travelling musician", "The mountain guide",
)
_VERBS = (
    "described", "remembered", "organised", "discovered", "explained",
    "watched", "collected", "repaired", "planted", "recorded",
)
_OBJECTS = (
    "the new reading programme", "an old wooden bridge", "a basket of apples",
    "the morning market", "a forgotten letter", "the narrow river path",
    "a row of beehives", "the harvest festival", "an unusual map",
    "the evening lessons",
)
_TAILS = (
    "before the first snow fell", "during the village festival",
    "while the rain kept falling", "after the long summer ended",
    "as the neighbours looked on", "near the edge of the forest",
    "in the weeks before the fair", "without telling anyone at first",
)

_CONTENT_STEMS = (
    "Why did the visitors return to the village?",
    "What did the neighbours learn from the meeting?",
    "How did the weather change the plan?",
    "What can we infer about the narrator?",
    "Which of the following happened first?",
    "What made the journey difficult?",
    "Why was the letter never delivered?",
    "What did the children decide to do next?",
)
_ALT_PHRASES = (
    "A change of plans.", "An early departure.", "A sudden storm.",
    "A broken promise.", "A quiet celebration.", "An unexpected visitor.",
    "A long walk home.", "A new tradition.", "A misplaced letter.",
    "A shared secret.", "A borrowed map.", "A late harvest.",
)


def _sentence(rng: random.Random) -> str:
    return (f"{rng.choice(_SUBJECTS)} {rng.choice(_VERBS)} "
            f"{rng.choice(_OBJECTS)} {rng.choice(_TAILS)}.")


def _paragraph(rng: random.Random, sentences: int) -> str:
    return " ".join(_sentence(rng) for _ in range(sentences))


def _continuous_body(rng: random.Random) -> str:
    return "\n".join(
        _paragraph(rng, rng.randint(2, 4)) for _ in range(rng.randint(3, 5))
    )


def _partly_continuous_body(rng: random.Random) -> str:
    steps = "\n".join(f"{i}. {_sentence(rng)}" for i in range(1, rng.randint(3, 5)))
    return f"{_paragraph(rng, 3)}\n{steps}\n{_paragraph(rng, 2)}"


def _non_continuous_body(rng: random.Random) -> str:
    days = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat")
    rows = [f"{d}\t{rng.randint(8, 10)}:00\t{rng.randint(16, 20)}:00"
            for d in days]
    return "\n".join(rows)


def _alternatives(rng: random.Random) -> Tuple[str, str, str, str]:
    return tuple(rng.sample(_ALT_PHRASES, 4))


def _stem(rng: random.Random, aspect: str) -> str:
    if aspect == "structure":
        return "Which is the best title for the passage?"
    if aspect == "vocabulary":
        return 'The word "harvest" in the passage is closest in meaning to _ .'
    return rng.choice(_CONTENT_STEMS)


# ---------------------------------------------------------------------------
# Demo corpus
# ---------------------------------------------------------------------------

def build_demo_corpus(out_dir: "str | Path", n_texts: int = 4,
                      mcqs_per_text: int = 3, seed: int = 7) -> Path:
    """A small clean corpus for the workbench; returns the corpus path."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "corpus.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for i in range(n_texts):
            text_id = f"demo{i}.txt"
            body = _continuous_body(rng)
            record = {
                "id": text_id,
                "article": body,
                "questions": [_stem(rng, "content") for _ in range(mcqs_per_text)],
                "options": [list(_alternatives(rng)) for _ in range(mcqs_per_text)],
                "answers": [rng.choice("ABCD") for _ in range(mcqs_per_text)],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


# ---------------------------------------------------------------------------
# Reference-scale release
#
# Layout (content texts = texts with at least one content-based MCQ):
#   group A: 412 texts whose MCQs reach the difficulty analysis (1181
#            survivors) plus 382 severe-unit MCQs spread over them;
#   group B:  54 partly-continuous texts, 145 MCQs that pass the severity
#            filter and drop at the partly-continuous stage;
#   group C: 572 texts with a severe text problem (1716 MCQs) plus the
#            leftover structure/vocabulary units;
#   plus 3 texts carrying only structure/vocabulary units and 4
#   non-continuous texts.
# ---------------------------------------------------------------------------

# target difficulty histogram for the 1181 analysed MCQs: bin -> count,
# and how many totals in the bin end in .5
_BIN_COUNTS = {
    5: 8, 6: 16, 7: 30, 8: 52, 9: 74, 10: 98, 11: 130, 12: 147, 13: 65,
    14: 148, 15: 140, 16: 110, 17: 75, 18: 46, 19: 26, 20: 10, 21: 4, 22: 2,
}
_HALF_COUNTS = {
    5: 2, 6: 4, 7: 8, 8: 12, 9: 18, 10: 24, 11: 30, 12: 36, 13: 29,
    14: 38, 15: 35, 16: 28, 17: 19, 18: 12, 19: 8, 20: 5, 21: 2, 22: 0,
}

_TOM_QUOTAS = {
    "LM/LM": 20, "LM/SM": 30, "SM/SM": 40, "LM/LLTI": 150, "SM/LLTI": 180,
    "LLTI/LLTI": 474, "HLTI": 230, "GEN": 57,
}
_POD_QUOTAS = {
    "no_distracting_information": 60,
    "literal_match_different_paragraph": 70,
    "synonymous_match_different_paragraph": 40,
    "invited_inference_outside_key_paragraph": 80,
    "one_distractor_same_paragraph": 103,
    "two_or_more_distractors_same_paragraph": 310,
    "inference_outside_text": 518,
}
_TOM_X2 = {"LM/LM": 1, "LM/SM": 2, "SM/SM": 3, "LM/LLTI": 4, "SM/LLTI": 5,
           "LLTI/LLTI": 6, "HLTI": 8, "GEN": 10}
_POD_X2 = {
    "no_distracting_information": 2,
    "literal_match_different_paragraph": 3,
    "synonymous_match_different_paragraph": 4,
    "invited_inference_outside_key_paragraph": 6,
    "one_distractor_same_paragraph": 8,
    "two_or_more_distractors_same_paragraph": 10,
    "inference_outside_text": 10,
}
_TOM_PAIRS = {
    "LM/LM": ("LM", "LM"), "LM/SM": ("LM", "SM"), "SM/SM": ("SM", "SM"),
    "LM/LLTI": ("LM", "LLTI"), "SM/LLTI": ("SM", "LLTI"),
    "LLTI/LLTI": ("LLTI", "LLTI"),
}
_HLTI_PAIRS = (("LM", "HLTI"), ("HLTI", "LM"), ("SM", "HLTI"),
               ("HLTI", "SM"), ("LLTI", "HLTI"), ("HLTI", "LLTI"))

_TOI_BY_POINTS = {
    1: ("person", "place", "thing", "group", "animal"),
    2: ("amount", "time", "action", "attribute", "location", "type/kind"),
    3: ("assertion", "verification", "condition", "manner", "goal",
        "purpose", "sequence", "role"),
    4: ("reason", "theme", "cause", "opinion", "effect", "result",
        "explanation"),
    5: ("definition", "equivalent", "difference", "advantage"),
}
_TOC_BY_POINTS = {0: ("none",), 1: ("addition", "counting"),
                  2: ("subtraction",), 3: ("multiplication",),
                  4: ("division",), 5: ("multiple",)}


@dataclass
class _TextSpec:
    text_id: str
    group: str                    # a, b, c, struct_only, non_continuous
    survivors: int = 0            # MCQs reaching the final analysis stage
    extras: int = 0               # severe-unit MCQs (group a)
    struct_units: int = 0         # structure/vocabulary MCQs
    text_marks: Tuple[str, ...] = ()   # error types on the text element
    text_format: Optional[str] = None

    @property
    def content_mcqs(self) -> int:
        if self.group == "c":
            return 3
        return self.survivors + self.extras

    @property
    def total_mcqs(self) -> int:
        if self.group == "non_continuous":
            return 3
        return self.content_mcqs + self.struct_units


def _plan_texts() -> List[_TextSpec]:
    specs: List[_TextSpec] = []

    def a_text(i: int) -> _TextSpec:
        survivors = 3 if i < 360 else (2 if i < 409 else 1)
        extras = 0
        if 92 <= i < 360:
            extras = 2 if i < 206 else 1
        if i < 92:
            marks: Tuple[str, ...] = ()
        elif i < 182 or 206 <= i < 208:
            marks = ("missing_spaces_punctuation",)
        elif i < 206 or 208 <= i < 289 or i == 360:
            marks = ("extra_spaces_punctuation",)
        else:
            marks = ("punctuation_errors",)
        return _TextSpec(f"a{i:04d}.txt", "a", survivors=survivors,
                         extras=extras, text_marks=marks,
                         text_format="continuous")

    specs.extend(a_text(i) for i in range(412))

    for i in range(54):
        survivors = 3 if i < 40 else (2 if i < 51 else 1)
        specs.append(_TextSpec(f"b{i:04d}.txt", "b", survivors=survivors,
                               text_marks=("punctuation_errors",),
                               text_format="partly_continuous"))

    for i in range(572):
        specs.append(_TextSpec(f"c{i:04d}.txt", "c",
                               struct_units=1 if i < 56 else 0,
                               text_marks=("grammatical_errors",)))

    for i in range(3):
        specs.append(_TextSpec(f"s{i:04d}.txt", "struct_only", struct_units=2,
                               text_format="continuous"))
    for i in range(4):
        specs.append(_TextSpec(f"n{i:04d}.txt", "non_continuous",
                               text_format="non_continuous"))

    assert len(specs) == 1045
    assert sum(s.total_mcqs for s in specs) == 3498
    a_specs = [s for s in specs if s.group == "a"]
    assert sum(s.survivors for s in a_specs) == 1181
    assert sum(s.extras for s in a_specs) == 382
    assert sum(s.survivors for s in specs if s.group == "b") == 145
    mcqs_on = lambda mark: sum(s.content_mcqs for s in specs
                               if mark in s.text_marks and s.group != "c")
    assert mcqs_on("missing_spaces_punctuation") == 458
    assert mcqs_on("extra_spaces_punctuation") == 446
    return specs


def _plan_rubric(rng: random.Random) -> List[dict]:
    """Per-analysed-MCQ rubric assignments hitting the published TOM/POD
    counts and the target difficulty histogram exactly."""
    toms = [cat for cat, n in _TOM_QUOTAS.items() for _ in range(n)]
    rng.shuffle(toms)

    # literal-match distractors carry the only odd POD half-step; giving
    # them to even-TOM records makes every .5 total come from TOM alone,
    # matching the half-count budget of the target histogram
    pods_even = [cat for cat, n in _POD_QUOTAS.items()
                 if cat != "literal_match_different_paragraph"
                 for _ in range(n)]
    rng.shuffle(pods_even)
    even_tom_idx = [i for i, cat in enumerate(toms) if _TOM_X2[cat] % 2 == 0]
    literal_idx = set(rng.sample(even_tom_idx, 70))
    pods: List[Optional[str]] = [None] * len(toms)
    for i in sorted(literal_idx):
        pods[i] = "literal_match_different_paragraph"
    it = iter(pods_even)
    for i in range(len(pods)):
        if pods[i] is None:
            pods[i] = next(it)

    # target totals in half-units, split by parity
    odd_values = sorted(2 * b + 1 for b, n in _HALF_COUNTS.items() for _ in range(n))
    even_values = sorted(2 * b for b, n in _BIN_COUNTS.items()
                         for _ in range(n - _HALF_COUNTS[b]))

    plans = [{"tom": toms[i], "pod": pods[i],
              "base_x2": _TOM_X2[toms[i]] + _POD_X2[pods[i]]}
             for i in range(len(toms))]
    odd_plans = sorted((p for p in plans if p["base_x2"] % 2 == 1),
                       key=lambda p: p["base_x2"])
    even_plans = sorted((p for p in plans if p["base_x2"] % 2 == 0),
                        key=lambda p: p["base_x2"])
    assert len(odd_plans) == len(odd_values) == 310
    assert len(even_plans) == len(even_values) == 871

    for pool, values in ((odd_plans, odd_values), (even_plans, even_values)):
        for plan, total_x2 in zip(pool, values):
            r = (total_x2 - plan["base_x2"]) // 2
            assert 1 <= r <= 18, (total_x2, plan)
            plan["total_x2"] = total_x2
            plan["r"] = r

    for plan in plans:
        r = plan["r"]
        toi = rng.randint(max(1, r - 13), min(5, r))
        budget = r - toi
        caps = [3, 3, 1, 1, 5]  # NPhr, NI, NIt, NPar/IC, TOC
        parts = []
        for j, cap in enumerate(caps):
            rest = sum(caps[j + 1:])
            lo, hi = max(0, budget - rest), min(cap, budget)
            v = rng.randint(lo, hi)
            parts.append(v)
            budget -= v
        assert budget == 0
        plan.update(toi_points=toi, nphr_points=parts[0], ni_points=parts[1],
                    nit_points=parts[2], nparic_points=parts[3],
                    toc_points=parts[4])

    rng.shuffle(plans)
    assert sum(p["total_x2"] for p in plans) == 30918
    return plans


def _rubric_fields(plan: dict, rng: random.Random) -> dict:
    toi_pts = plan["toi_points"]
    if toi_pts == 5 and rng.random() < 0.2:
        toi: "str | dict" = {"A": "time", "B": "time", "C": "amount", "D": "amount"}
    else:
        toi = rng.choice(_TOI_BY_POINTS[toi_pts])
    fields: dict = {"toi_concepts": toi}

    cat = plan["tom"]
    if cat == "GEN":
        fields["tom_gen"] = True
    elif cat == "HLTI":
        tq, ta = rng.choice(_HLTI_PAIRS)
        fields.update(tom_tq=tq, tom_ta=ta)
    else:
        tq, ta = _TOM_PAIRS[cat]
        if rng.random() < 0.5:
            tq, ta = ta, tq
        fields.update(tom_tq=tq, tom_ta=ta)

    fields["nphr"] = {0: 1, 1: 2, 2: 3}.get(plan["nphr_points"], rng.randint(4, 6))
    fields["ni"] = {0: 1, 1: 2}.get(plan["ni_points"])
    if fields["ni"] is None:
        fields["ni"] = rng.choice((3, 4)) if plan["ni_points"] == 2 else rng.randint(5, 7)
    fields["nit"] = "unspecified" if plan["nit_points"] else "specified"
    if plan["nparic_points"] == 0:
        fields["npar"], fields["ic"] = "within_paragraph", "compare"
    elif rng.random() < 0.5:
        fields["npar"], fields["ic"] = "between_paragraphs", "compare"
    else:
        fields["npar"], fields["ic"] = "within_paragraph", "contrast"
    fields["toc"] = rng.choice(_TOC_BY_POINTS[plan["toc_points"]])
    return fields


def _bases_for(rng: random.Random, length: int) -> List[Basis]:
    def span(lo_frac: float, hi_frac: float) -> Span:
        lo = int(length * lo_frac)
        hi = max(lo + 1, int(length * hi_frac))
        start = rng.randint(lo, max(lo, hi - 2))
        end = min(length, start + rng.randint(25, 80))
        return Span(start, max(end, start + 1))

    bases = [
        Basis("A", span(0.0, 0.22)),
        Basis("B", span(0.25, 0.55)),
        Basis("C", span(0.35, 0.68)),
        Basis("D", span(0.70, 0.93)),
    ]
    if rng.random() < 0.1:
        # second early basis for A; same-label overlaps are merged, the way
        # the workbench merges selections
        extra = span(0.0, 0.25)
        first = bases[0].span
        if extra.end < first.start or extra.start > first.end:
            bases.append(Basis("A", extra))
        else:
            bases[0] = Basis("A", Span(min(first.start, extra.start),
                                       max(first.end, extra.end)))
    return bases


def build_reference_release(out_dir: "str | Path", seed: int = 20240817
                            ) -> Tuple[Path, Path]:
    """Write ``corpus.jsonl`` and ``annotations.jsonl``; returns both paths."""
    rng = random.Random(seed)
    specs = _plan_texts()
    plans = _plan_rubric(random.Random(seed + 1))
    plan_iter = iter(plans)

    # severe-unit marks for the 382 extra MCQs on group-a texts
    extra_marks = (
        [ErrorMark("alternative:B", "overlapping_alternatives")] * 283
        + [ErrorMark("interaction:t_a", "inconsistency_t_a")] * 41
        + [ErrorMark("question", "answerable_without_reading")] * 58
    )
    random.Random(seed + 2).shuffle(extra_marks)
    extra_iter = iter(extra_marks)

    # survivor-unit marks: 191 punctuation errors in questions (76 of them
    # on clean-text survivors so exactly 200 MCQs stay fully acceptable)
    # and 55 moderate inconsistencies between alternatives
    clean_quota = {"punctuation_errors": 76}
    other_quota = {"punctuation_errors": 115, "inconsistency_between_a": 55}

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.jsonl"
    annotations_path = out / "annotations.jsonl"

    struct_rotation = ["structure", "vocabulary"]
    records: List[AnnotationRecord] = []

    with corpus_path.open("w", encoding="utf-8") as fh:
        for spec in specs:
            if spec.group == "non_continuous":
                body = _non_continuous_body(rng)
            elif spec.group == "b":
                body = _partly_continuous_body(rng)
            else:
                body = _continuous_body(rng)
            passage = TextPassage.from_body(spec.text_id, body)

            aspects: List[str] = []
            if spec.group == "non_continuous":
                aspects = ["content"] * 3
            else:
                aspects = ["content"] * spec.content_mcqs
                for _ in range(spec.struct_units):
                    aspects.append(struct_rotation[0])
                    struct_rotation.reverse()

            units: List[MCQUnit] = []
            for i, aspect in enumerate(aspects):
                units.append(MCQUnit(
                    mcq_id=f"{spec.text_id}:q{i}",
                    text_id=spec.text_id,
                    stem=_stem(rng, aspect),
                    alternatives=_alternatives(rng),
                    key="ABCD"[i % 4],
                ))
            fh.write(json.dumps(corpus_record(passage, units),
                                ensure_ascii=False) + "\n")

            text_marks = [ErrorMark("text", e) for e in spec.text_marks]
            for i, (unit, aspect) in enumerate(zip(units, aspects)):
                record = AnnotationRecord(mcq_id=unit.mcq_id)
                record.error_marks.extend(text_marks)
                record.aspect = aspect
                if spec.text_format is not None:
                    record.text_format = spec.text_format

                if spec.group in ("a", "b") and i < spec.survivors:
                    plan = next(plan_iter) if spec.group == "a" else None
                    if plan is not None:
                        fields = _rubric_fields(plan, rng)
                        for k, v in fields.items():
                            setattr(record, k, v)
                        pod_cat = plan["pod"]
                        record.bases = _bases_for(rng, len(body))
                    else:
                        # partly-continuous survivors: annotated to the
                        # model's best ability, dropped before scoring
                        record.toi_concepts = "person"
                        record.tom_tq = record.tom_ta = "LM"
                        record.nphr = record.ni = 1
                        record.nit = "specified"
                        record.npar = "within_paragraph"
                        record.ic = "compare"
                        pod_cat = "no_distracting_information"
                        record.toc = "none"
                    record.pod_per_distractor = {
                        label: pod_cat for label in unit.distractor_labels}

                    quota = clean_quota if not spec.text_marks else other_quota
                    if spec.group == "a":
                        for mark_type in list(quota):
                            if quota[mark_type] > 0:
                                quota[mark_type] -= 1
                                element = ("question" if mark_type == "punctuation_errors"
                                           else "alternative:B")
                                record.error_marks.append(
                                    ErrorMark(element, mark_type))
                                break
                elif spec.group == "a" and i >= spec.survivors:
                    record.error_marks.append(next(extra_iter))
                elif spec.group == "c" and aspect == "content" and i == 0 and \
                        spec.text_id.endswith(("0000.txt", "0001.txt", "0002.txt",
                                               "0003.txt", "0004.txt")):
                    # a few 3-to-1 concept splits among the excluded MCQs
                    record.toi_concepts = {"A": "person", "B": "person",
                                           "C": "person", "D": "time"}
                    record.exclusion_flags.add("toi_3to1_split")
                records.append(record)

    assert next(plan_iter, None) is None
    assert next(extra_iter, None) is None
    assert all(v == 0 for v in clean_quota.values()), clean_quota
    assert all(v == 0 for v in other_quota.values()), other_quota

    with annotations_path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
    return corpus_path, annotations_path


def main(argv: Optional[Sequence[str]] = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(
        description="Generate a synthetic corpus and annotation release.")
    parser.add_argument("out_dir")
    parser.add_argument("--demo", action="store_true",
                        help="small clean corpus only")
    parser.add_argument("--seed", type=int, default=20240817)
    args = parser.parse_args(argv)
    if args.demo:
        path = build_demo_corpus(args.out_dir, seed=args.seed)
        print(f"wrote {path}")
    else:
        corpus_path, annotations_path = build_reference_release(
            args.out_dir, seed=args.seed)
        print(f"wrote {corpus_path}")
        print(f"wrote {annotations_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
