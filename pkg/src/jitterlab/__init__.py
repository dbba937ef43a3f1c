"""Jitter: prediction churn across models retrained on updated data."""

from .analysis import (
    ComplexityPoint,
    OverlapTable,
    complexity_correlation,
    ensemble_predict,
    overlap_table,
    unstable_examples,
    window_ensembles,
)
from .cdu import CduPlan, LabeledDataset, LabeledItem, generate_cdu_splits, largest_remainder
from .core import (
    AccuracyProfile,
    ClassificationRun,
    EvaluationSet,
    RunCollection,
    SequenceExample,
    SequenceRun,
    SequenceRunCollection,
    accuracy_profile,
    ingest_classification,
    ingest_sequence,
)
from .metrics import (
    JitterReport,
    accuracy_stddev,
    aggregate_jitter,
    aggregate_jitter_seq,
    jitter_report,
    max_jitter_bound,
    min_jitter_bound,
    pairwise_jitter_class,
    pairwise_jitter_seq,
    system_wide_accuracy,
)
from .report import TradeoffPoint, emit_tradeoff, render_jitter_report
from .simulator import SimSpec, brute_force_churn_extrema, synthesize_runs

__version__ = "0.1.0"
