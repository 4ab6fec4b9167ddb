"""Experiment harness: exponent algebra, corpora, operator ratios and reports."""

from .corpus import DEFAULT_KINDS, Corpus, CorpusEntry, make_corpus
from .experiments import (
    ROUNDING_SLACK,
    cube_ball_constant,
    experiment_ball_axioms,
    experiment_bmo_necessity_probe,
    experiment_bmo_sufficiency,
    experiment_fractional_integral,
    experiment_lipschitz,
    experiment_pointwise_dominations,
    experiment_rubio_de_francia,
    experiment_sharp_maximal,
)
from .exponents import ExponentPair, NogayamaCheck, RelationResult, exponent_relation, nogayama_relation_check
from .harness import THREADS_ENV, OperatorSpec, operator_ratio, parallel_map, thread_count
from .report import SCHEMA_VERSION, Check, RatioRow, VerificationReport, is_refinement_stable, refinement_growth

__all__ = [
    "DEFAULT_KINDS",
    "Corpus",
    "CorpusEntry",
    "make_corpus",
    "ROUNDING_SLACK",
    "cube_ball_constant",
    "experiment_ball_axioms",
    "experiment_bmo_necessity_probe",
    "experiment_bmo_sufficiency",
    "experiment_fractional_integral",
    "experiment_lipschitz",
    "experiment_pointwise_dominations",
    "experiment_rubio_de_francia",
    "experiment_sharp_maximal",
    "ExponentPair",
    "NogayamaCheck",
    "RelationResult",
    "exponent_relation",
    "nogayama_relation_check",
    "THREADS_ENV",
    "OperatorSpec",
    "operator_ratio",
    "parallel_map",
    "thread_count",
    "SCHEMA_VERSION",
    "Check",
    "RatioRow",
    "VerificationReport",
    "is_refinement_stable",
    "refinement_growth",
]
