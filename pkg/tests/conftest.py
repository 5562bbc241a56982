from __future__ import annotations

import pytest

from mcqlab.model import AnnotationRecord, MCQUnit, TextPassage


def make_record(mcq_id: str = "t1:q0", **overrides) -> AnnotationRecord:
    """A complete, all-minimum annotation record; override fields per test."""
    base = dict(
        toi_concepts="person",
        tom_tq="LM",
        tom_ta="LM",
        tom_gen=False,
        nphr=1,
        ni=1,
        nit="specified",
        npar="within_paragraph",
        ic="compare",
        pod_per_distractor={"B": "no_distracting_information",
                            "C": "no_distracting_information",
                            "D": "no_distracting_information"},
        toc="none",
    )
    base.update(overrides)
    return AnnotationRecord(mcq_id=mcq_id, **base)


def make_mcq(mcq_id: str = "t1:q0", text_id: str = "t1",
             stem: str = "What did Tom see?",
             alternatives=("A dog.", "A cat.", "A bird.", "A fish."),
             key: str = "A", **kwargs) -> MCQUnit:
    return MCQUnit(mcq_id=mcq_id, text_id=text_id, stem=stem,
                   alternatives=tuple(alternatives), key=key, **kwargs)


@pytest.fixture
def passage() -> TextPassage:
    body = ("Tom walked to the river early in the morning. He saw a dog "
            "playing near the water.\n"
            "Later that day, Tom told his sister about the dog. She wanted "
            "to see it too.\n"
            "They returned together in the evening, but the dog was gone.")
    return TextPassage.from_body("t1", body)
