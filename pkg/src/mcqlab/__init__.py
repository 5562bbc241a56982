"""Quality linting, difficulty scoring, and annotation tooling for
RACE-format multiple-choice reading comprehension corpora."""

from .classify import classify_mcq_aspect, classify_membership, classify_text_format
from .corpus_io import Corpus, load_annotations, load_corpus, save_annotations, save_corpus
from .errors import (
    ErrorFinding,
    aggregate_category,
    detect_mechanical_errors,
    severity_of,
)
from .model import (
    AnnotationRecord,
    Basis,
    ErrorMark,
    MCQUnit,
    Scorecard,
    Span,
    TextPassage,
)
from .pipeline import (
    apply_quality_gate,
    bases_bucket_map,
    bases_heatmap,
    build_reports,
    difficulty_distribution,
    variable_distribution,
)
from .scoring import (
    resolve_alternatives_toi,
    resolve_multi_category,
    score_ic,
    score_tom,
    score_total,
    score_variable,
    select_pod_category,
    validate_complete,
)

__version__ = "0.1.0"
