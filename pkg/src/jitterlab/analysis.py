"""Ensembles, unstable-example overlaps and the complexity/jitter correlation."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import ClassificationRun, Label, PathLike, RunCollection
from .errors import (
    EmptyMemberList,
    EvalSetMismatch,
    IndexOutOfRange,
    NeedAtLeastTwoRuns,
    ParseError,
    TooFewPoints,
    UnknownLabelWarning,
    ZeroVariance,
)

BUCKETS = ("2C", "3C", "4C", "gt4C")


def vote_order(collection: RunCollection) -> List[Label]:
    """Tie-break ranking: alphabet order, then out-of-alphabet labels lexicographically."""
    alphabet = list(collection.eval_set.label_alphabet)
    known = set(alphabet)
    return alphabet + sorted(l for l in collection.label_index if l not in known)


def ensemble_predict(collection: RunCollection, member_indices: Sequence[int],
                     run_id: Optional[str] = None) -> ClassificationRun:
    """Majority vote over the member runs.

    Ties go to the tied label that comes first in the alphabet, which biases
    ties toward early labels.
    """
    members = list(member_indices)
    if not members:
        raise EmptyMemberList("an ensemble needs at least one member")
    for m in members:
        if not 0 <= m < collection.n_runs:
            raise IndexOutOfRange(f"member index {m} outside 0..{collection.n_runs - 1}")
    order = vote_order(collection)
    rank = np.empty(len(order), dtype=np.int64)
    for pos, label in enumerate(order):
        rank[collection.label_index[label]] = pos
    ranked = rank[collection.codes[members]]
    n = collection.n_examples
    votes = np.zeros((len(order), n), dtype=np.int64)
    cols = np.arange(n)
    for row in ranked:
        np.add.at(votes, (row, cols), 1)
    winners = votes.argmax(axis=0)
    ids = collection.eval_set.ids
    if run_id is None:
        run_id = "ens[" + ",".join(str(m) for m in members) + "]"
    return ClassificationRun(run_id, {i: order[w] for i, w in zip(ids, winners)})


def window_ensembles(collection: RunCollection, size: int = 5) -> RunCollection:
    """One ensemble per sliding window of ``size`` consecutive runs.

    Mirrors keeping the past ``size`` data versions: version ``v`` votes over
    runs ``v .. v + size - 1``.
    """
    if size < 1:
        raise EmptyMemberList("window size must be positive")
    if size > collection.n_runs:
        raise IndexOutOfRange(f"window of {size} exceeds {collection.n_runs} runs")
    runs = tuple(
        ensemble_predict(collection, range(v, v + size), run_id=f"ens{v + 1}")
        for v in range(collection.n_runs - size + 1)
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnknownLabelWarning)
        return RunCollection(collection.eval_set, runs)


def unstable_examples(collection: RunCollection) -> Dict[str, int]:
    """Examples receiving two or more distinct predictions, with that count."""
    if collection.n_runs < 2:
        raise NeedAtLeastTwoRuns(f"instability needs at least two runs, got {collection.n_runs}")
    codes = np.sort(collection.codes, axis=0)
    distinct = 1 + np.count_nonzero(np.diff(codes, axis=0), axis=0)
    return {i: int(d) for i, d in zip(collection.eval_set.ids, distinct) if d >= 2}


@dataclass(frozen=True)
class OverlapTable:
    pair: Tuple[str, str]
    buckets: Dict[str, int]
    total: int

    def to_json(self) -> dict:
        return {"pair": list(self.pair), **{b: self.buckets[b] for b in BUCKETS}, "total": self.total}

    @classmethod
    def from_json(cls, obj: dict) -> "OverlapTable":
        return cls(tuple(obj["pair"]), {b: int(obj[b]) for b in BUCKETS}, int(obj["total"]))


def _bucket(cardinality: int) -> str:
    return f"{cardinality}C" if cardinality <= 4 else "gt4C"


def overlap_table(coll_a: RunCollection, coll_b: RunCollection,
                  names: Tuple[str, str] = ("A", "B")) -> OverlapTable:
    """Count examples unstable under both collections.

    Each shared example is bucketed by how many distinct labels it received
    across the runs of *both* collections together.
    """
    if coll_a.eval_set != coll_b.eval_set:
        raise EvalSetMismatch("the two collections are not over the same evaluation set")
    unstable_a = unstable_examples(coll_a)
    unstable_b = unstable_examples(coll_b)
    buckets = dict.fromkeys(BUCKETS, 0)
    for example_id in coll_a.eval_set.ids:
        if example_id in unstable_a and example_id in unstable_b:
            labels = {r.predictions[example_id] for r in coll_a.runs}
            labels |= {r.predictions[example_id] for r in coll_b.runs}
            buckets[_bucket(len(labels))] += 1
    return OverlapTable(tuple(names), buckets, sum(buckets.values()))


@dataclass(frozen=True)
class ComplexityPoint:
    config_name: str
    trainable_params: int
    jitter: float

    def __post_init__(self):
        if self.trainable_params < 0:
            raise ValueError("trainable_params must be non-negative")
        if not 0 <= self.jitter <= 1:
            raise ValueError(f"jitter must be a fraction in [0, 1], got {self.jitter}")


def complexity_correlation(points: Sequence[ComplexityPoint]) -> float:
    """Pearson correlation between parameter count and jitter."""
    if len(points) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(points)}")
    xs = [float(p.trainable_params) for p in points]
    ys = [p.jitter for p in points]
    if len(set(xs)) < 2 or len(set(ys)) < 2:
        raise ZeroVariance("parameter counts and jitter must both vary")
    mx = math.fsum(xs) / len(xs)
    my = math.fsum(ys) / len(ys)
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def read_complexity_csv(path: PathLike) -> List[ComplexityPoint]:
    """Read ``config,params,jitter`` rows (jitter as a fraction)."""
    path = Path(path)
    points = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"config", "params", "jitter"} - set(reader.fieldnames or ())
        if missing:
            raise ParseError(path, 1, f"missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                points.append(ComplexityPoint(row["config"], int(row["params"]), float(row["jitter"])))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return points
