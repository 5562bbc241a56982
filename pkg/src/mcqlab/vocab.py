"""Load the shared vocabulary file and expose the scoring tables.

Everything categorical in the toolkit (rubric vocabularies, point tables,
error typology, classification labels) comes from ``data/vocabulary.json``.
The browser workbench reads the same file, so the two sides cannot drift.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Dict, FrozenSet, List, Optional, Tuple

from .model import VocabularyError


@lru_cache(maxsize=1)
def raw_vocabulary() -> dict:
    ref = resources.files("mcqlab").joinpath("data/vocabulary.json")
    return json.loads(ref.read_text(encoding="utf-8"))


class ScoringTables:
    """Point tables for the nine rubric variables, in half-point units."""

    def __init__(self, raw: Optional[dict] = None) -> None:
        raw = raw or raw_vocabulary()
        v = raw["variables"]

        self.toi_points: Dict[str, int] = {}
        for band in v["TOI"]["bands"]:
            for concept in band["concepts"]:
                self.toi_points[concept] = band["points_x2"]
        self.toi_aliases: Dict[str, str] = dict(v["TOI"]["aliases"])
        self.toi_context_dependent: Dict[str, str] = dict(v["TOI"]["context_dependent"])

        self.tom_relations: Tuple[str, ...] = tuple(v["TOM"]["relations"])
        self.tom_pairs: Dict[FrozenSet[str], int] = {}
        for pair in v["TOM"]["symmetric_pairs"]:
            self.tom_pairs[frozenset((pair["a"], pair["b"]))] = pair["points_x2"]
        self.tom_hlti_x2: int = v["TOM"]["hlti_points_x2"]
        self.tom_gen_x2: int = v["TOM"]["gen_points_x2"]
        self.tom_categories: List[Tuple[str, int]] = [
            (c["name"], c["points_x2"]) for c in v["TOM"]["categories"]
        ]

        self.nphr_bands = [
            (b["label"], b["min"], b["max"], b["points_x2"]) for b in v["NPhr"]["bands"]
        ]
        self.ni_bands = [
            (b["label"], b["min"], b["max"], b["points_x2"]) for b in v["NI"]["bands"]
        ]

        self.nit_points: Dict[str, int] = {
            c["name"]: c["points_x2"] for c in v["NIt"]["categories"]
        }
        self.npar_points: Dict[str, int] = {
            c["name"]: c["points_x2"] for c in v["NPar"]["categories"]
        }
        self.ic_categories: Tuple[str, ...] = tuple(
            c["name"] for c in v["IC"]["categories"]
        )
        self.ic_row_points: Tuple[int, ...] = tuple(
            r["points_x2"] for r in v["IC"]["rows"]
        )

        # POD rows keep the table order; ties on points resolve to the later row.
        self.pod_rows: List[Tuple[str, int]] = [
            (c["name"], c["points_x2"]) for c in v["POD"]["categories"]
        ]
        self.pod_points: Dict[str, int] = dict(self.pod_rows)
        self.pod_row_index: Dict[str, int] = {
            name: i for i, (name, _) in enumerate(self.pod_rows)
        }

        self.toc_points: Dict[str, int] = {
            c["name"]: c["points_x2"] for c in v["TOC"]["categories"]
        }

    def resolve_toi_concept(self, concept: str) -> str:
        """Map a concept (or one of its accepted aliases) to its table entry."""
        c = concept.strip().lower()
        if c in self.toi_points:
            return c
        if c in self.toi_aliases:
            return self.toi_aliases[c]
        if c in self.toi_context_dependent:
            raise VocabularyError(
                f"TOI concept {concept!r} is context-dependent: "
                f"{self.toi_context_dependent[c]}"
            )
        raise VocabularyError(f"unknown TOI concept {concept!r}")

    def toi_points_of(self, concept: str) -> int:
        return self.toi_points[self.resolve_toi_concept(concept)]

    def band_points(self, bands, count: int, variable: str) -> int:
        for _, lo, hi, pts in bands:
            if count >= lo and (hi is None or count <= hi):
                return pts
        raise VocabularyError(f"{variable} count {count} outside all bands")

    def band_label(self, bands, count: int, variable: str) -> str:
        for label, lo, hi, _ in bands:
            if count >= lo and (hi is None or count <= hi):
                return label
        raise VocabularyError(f"{variable} count {count} outside all bands")


@lru_cache(maxsize=1)
def tables() -> ScoringTables:
    return ScoringTables()


@lru_cache(maxsize=1)
def error_severity_map() -> Dict[str, str]:
    return {e["name"]: e["severity"] for e in raw_vocabulary()["error_types"]}


@lru_cache(maxsize=1)
def error_elements_map() -> Dict[str, Tuple[str, ...]]:
    return {
        e["name"]: tuple(e["elements"]) for e in raw_vocabulary()["error_types"]
    }


def closed_set(name: str) -> Tuple[str, ...]:
    return tuple(raw_vocabulary()[name])


def check_value(value: str, allowed, what: str) -> str:
    if value not in allowed:
        raise VocabularyError(f"unknown {what} {value!r} (expected one of {sorted(allowed)})")
    return value
