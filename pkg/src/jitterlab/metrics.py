"""Jitter, its accuracy-implied bounds, and related scalar metrics.

All disagreement counts are integers; each returned fraction is produced by a
single division at the end, so results do not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from .core import (
    AccuracyProfile,
    ClassificationRun,
    EvaluationSet,
    RunCollection,
    SequenceExample,
    SequenceRun,
    SequenceRunCollection,
    _check_alignment,
    accuracy_profile,
)
from .errors import EmptyEvalSet, KeyMismatch, LengthMismatch, NeedAtLeastTwoRuns


@dataclass(frozen=True)
class PairwiseJitter:
    run_i: str
    run_j: str
    value: float


@dataclass(frozen=True)
class JitterReport:
    """Everything the ``jitter`` command reports. All rates are fractions."""

    run_ids: Tuple[str, ...]
    unit: str  # "examples" or "tokens"
    size: int
    pairwise: Tuple[PairwiseJitter, ...]
    jitter: float
    min_bound: float
    max_bound: float
    accuracy: Tuple[float, ...]
    accuracy_stddev: float

    @property
    def n_runs(self) -> int:
        return len(self.run_ids)

    def matrix(self) -> np.ndarray:
        """Symmetric ``J[i, j]`` matrix with a zero diagonal."""
        pos = {rid: k for k, rid in enumerate(self.run_ids)}
        out = np.zeros((self.n_runs, self.n_runs))
        for p in self.pairwise:
            out[pos[p.run_i], pos[p.run_j]] = out[pos[p.run_j], pos[p.run_i]] = p.value
        return out


def _need_two(n: int) -> None:
    if n < 2:
        raise NeedAtLeastTwoRuns(f"jitter needs at least two runs, got {n}")


def _n_pairs(n: int) -> int:
    return n * (n - 1) // 2


# --------------------------------------------------------------------------
# classification jitter


def disagreement_count(run_i: ClassificationRun, run_j: ClassificationRun,
                       eval_set: EvaluationSet) -> int:
    ids = eval_set.ids
    _check_alignment(ids, run_i.predictions, run_i.run_id)
    _check_alignment(ids, run_j.predictions, run_j.run_id)
    pi, pj = run_i.predictions, run_j.predictions
    return sum(pi[x] != pj[x] for x in ids)


def pairwise_jitter_class(run_i: ClassificationRun, run_j: ClassificationRun,
                          eval_set: EvaluationSet) -> float:
    """Fraction of examples on which the two runs predict different labels."""
    if len(eval_set) == 0:
        raise EmptyEvalSet("evaluation set has no examples")
    return disagreement_count(run_i, run_j, eval_set) / len(eval_set)


def _pair_counts(codes: np.ndarray) -> List[Tuple[int, int, int]]:
    return [
        (i, j, int(np.count_nonzero(codes[i] != codes[j])))
        for i, j in combinations(range(codes.shape[0]), 2)
    ]


def aggregate_jitter(collection: RunCollection) -> float:
    """Mean pairwise jitter over all ``N(N-1)/2`` unordered run pairs."""
    _need_two(collection.n_runs)
    total = sum(c for _, _, c in _pair_counts(collection.codes))
    return total / (collection.n_examples * _n_pairs(collection.n_runs))


# --------------------------------------------------------------------------
# sequence jitter


def pairwise_jitter_seq(run_i: SequenceRun, run_j: SequenceRun,
                        seq_eval_set: Sequence[SequenceExample]) -> float:
    """Token-level disagreement, micro-averaged over every token in the set."""
    n_tokens = sum(len(ex.tokens) for ex in seq_eval_set)
    if n_tokens < 1:
        raise EmptyEvalSet("sequence evaluation set has no tokens")
    ids = [ex.example_id for ex in seq_eval_set]
    _check_alignment(ids, run_i.predictions, run_i.run_id)
    _check_alignment(ids, run_j.predictions, run_j.run_id)
    diff = 0
    for ex in seq_eval_set:
        a, b = run_i.predictions[ex.example_id], run_j.predictions[ex.example_id]
        if len(a) != len(ex.tokens) or len(b) != len(ex.tokens):
            raise LengthMismatch(f"tag count differs from token count for {ex.example_id!r}")
        diff += sum(s != t for s, t in zip(a, b))
    return diff / n_tokens


def aggregate_jitter_seq(collection: SequenceRunCollection) -> float:
    _need_two(collection.n_runs)
    total = sum(c for _, _, c in _pair_counts(collection.codes))
    return total / (collection.n_tokens * _n_pairs(collection.n_runs))


# --------------------------------------------------------------------------
# bounds implied by accuracies alone


def pair_bounds(a_i: Fraction, a_j: Fraction) -> Tuple[Fraction, Fraction]:
    """Accuracy-implied min and max churn of two runs.

    The minimum is the accuracy gap. The maximum adds the largest possible
    correct-to-wrong flips to the largest possible wrong-to-correct flips, so
    it assumes two runs that are both wrong on an example agree there. That
    always holds with two classes; with more classes see
    :func:`pair_max_attainable`.
    """
    e_i, e_j = 1 - a_i, 1 - a_j
    return abs(a_i - a_j), min(e_i, a_j) + min(e_j, a_i)


def pair_max_attainable(a_i: Fraction, a_j: Fraction, n_classes: int) -> Fraction:
    """Largest churn actually reachable when both-wrong runs may emit different labels.

    Equals the :func:`pair_bounds` maximum for two classes or whenever
    ``a_i + a_j >= 1``; otherwise every example with at least one error can differ.
    """
    if n_classes < 2:
        raise ValueError("need at least two classes")
    if n_classes == 2:
        return pair_bounds(a_i, a_j)[1]
    return min(Fraction(1), (1 - a_i) + (1 - a_j))


def pairwise_bounds(profile: AccuracyProfile) -> List[Tuple[str, str, Fraction, Fraction]]:
    """``(run_i, run_j, min, max)`` for every unordered pair, as exact fractions."""
    _need_two(len(profile))
    return [
        (ri.run_id, rj.run_id, *pair_bounds(ri.accuracy, rj.accuracy))
        for ri, rj in combinations(profile.per_run, 2)
    ]


def min_jitter_bound_exact(profile: AccuracyProfile) -> Fraction:
    pairs = pairwise_bounds(profile)
    return sum((lo for *_, lo, _ in pairs), Fraction(0)) / len(pairs)


def max_jitter_bound_exact(profile: AccuracyProfile) -> Fraction:
    pairs = pairwise_bounds(profile)
    return sum((hi for *_, hi in pairs), Fraction(0)) / len(pairs)


def min_jitter_bound(profile: AccuracyProfile) -> float:
    return float(min_jitter_bound_exact(profile))


def max_jitter_bound(profile: AccuracyProfile) -> float:
    return float(max_jitter_bound_exact(profile))


def accuracy_stddev(profile: AccuracyProfile) -> float:
    """Sample standard deviation (``N - 1`` denominator) of per-run accuracy."""
    _need_two(len(profile))
    accs = profile.accuracies
    mean = sum(accs, Fraction(0)) / len(accs)
    var = sum(((a - mean) ** 2 for a in accs), Fraction(0)) / (len(accs) - 1)
    return math.sqrt(var)


# --------------------------------------------------------------------------
# two-step systems


def system_wide_accuracy(intent_correct: Mapping[str, bool],
                         slots_correct: Mapping[str, bool]) -> float:
    """Fraction of examples where both the intent and the whole slot sequence are right."""
    if set(intent_correct) != set(slots_correct):
        only_a = sorted(set(intent_correct) - set(slots_correct))
        only_b = sorted(set(slots_correct) - set(intent_correct))
        raise KeyMismatch(f"key sets differ: intent-only {only_a[:5]}, slots-only {only_b[:5]}")
    if not intent_correct:
        raise EmptyEvalSet("no examples")
    both = sum(bool(intent_correct[k]) and bool(slots_correct[k]) for k in intent_correct)
    return both / len(intent_correct)


def intent_correctness(run: ClassificationRun, eval_set: EvaluationSet) -> dict:
    _check_alignment(eval_set.ids, run.predictions, run.run_id)
    return {i: run.predictions[i] == g for i, g in eval_set.examples}


def slots_correctness(run: SequenceRun, seq_eval_set: Sequence[SequenceExample]) -> dict:
    """Exact whole-sequence match of predicted against gold tags, per example."""
    _check_alignment([ex.example_id for ex in seq_eval_set], run.predictions, run.run_id)
    return {ex.example_id: tuple(run.predictions[ex.example_id]) == ex.gold for ex in seq_eval_set}


# --------------------------------------------------------------------------
# reports


def jitter_report(collection: RunCollection | SequenceRunCollection) -> JitterReport:
    _need_two(collection.n_runs)
    codes = collection.codes
    size = codes.shape[1]
    ids = collection.run_ids
    counts = _pair_counts(codes)
    profile = accuracy_profile(collection)
    return JitterReport(
        run_ids=ids,
        unit="tokens" if isinstance(collection, SequenceRunCollection) else "examples",
        size=size,
        pairwise=tuple(PairwiseJitter(ids[i], ids[j], c / size) for i, j, c in counts),
        jitter=sum(c for *_, c in counts) / (size * len(counts)),
        min_bound=min_jitter_bound(profile),
        max_bound=max_jitter_bound(profile),
        accuracy=tuple(float(a) for a in profile.accuracies),
        accuracy_stddev=accuracy_stddev(profile),
    )
