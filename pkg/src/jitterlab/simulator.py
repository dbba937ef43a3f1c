"""Synthetic run collections and an exhaustive churn oracle.

``synthesize_runs`` pins every run's accuracy exactly while the error-overlap
knob ``rho`` moves inter-run churn between its extremes: at ``rho = 1`` runs
share as many errors as their counts allow, at ``rho = 0`` errors are spread
round-robin over the examples so they overlap as little as possible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import FrozenSet, List, Sequence, Tuple

from .core import ClassificationRun, EvaluationSet, PathLike, RunCollection
from .errors import InfeasibleSpec, InstanceTooLarge
from .rng import MASK64, SplitMix64

MAX_ORACLE_EXAMPLES = 8
MAX_ORACLE_CLASSES = 3


@dataclass(frozen=True)
class SimSpec:
    n_examples: int
    n_classes: int
    n_runs: int
    accuracies: Tuple[float, ...]
    error_overlap: float = 0.5
    seed: int = 0
    # one corruption stream per example, so runs erring on the same example agree
    shared_error_labels: bool = True

    def __post_init__(self):
        object.__setattr__(self, "accuracies", tuple(self.accuracies))
        if self.n_examples < 1 or self.n_classes < 2 or self.n_runs < 2:
            raise InfeasibleSpec("need n_examples >= 1, n_classes >= 2, n_runs >= 2")
        if len(self.accuracies) != self.n_runs:
            raise InfeasibleSpec(f"{len(self.accuracies)} accuracies for {self.n_runs} runs")
        if not 0 <= self.error_overlap <= 1:
            raise InfeasibleSpec(f"error_overlap must lie in [0, 1], got {self.error_overlap}")
        if not 0 <= self.seed <= MASK64:
            raise InfeasibleSpec("seed must be an unsigned 64-bit integer")
        self.error_counts()

    def error_counts(self) -> List[int]:
        out = []
        for a in self.accuracies:
            correct = Fraction(repr(a) if isinstance(a, float) else a) * self.n_examples
            if correct.denominator != 1:
                raise InfeasibleSpec(f"accuracy {a} is not a whole count out of {self.n_examples}")
            if not 0 <= correct <= self.n_examples:
                raise InfeasibleSpec(f"accuracy {a} outside [0, 1]")
            out.append(self.n_examples - int(correct))
        return out

    @classmethod
    def from_counts(cls, n_examples: int, n_classes: int, correct: Sequence[int],
                    error_overlap: float = 0.5, seed: int = 0, **kw) -> "SimSpec":
        accs = tuple(Fraction(c, n_examples) for c in correct)
        return cls(n_examples, n_classes, len(correct), accs, error_overlap, seed, **kw)

    def to_json(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "n_classes": self.n_classes,
            "n_runs": self.n_runs,
            "accuracies": [float(a) for a in self.accuracies],
            "error_overlap": self.error_overlap,
            "seed": self.seed,
            "shared_error_labels": self.shared_error_labels,
        }


def read_sim_spec(path: PathLike) -> SimSpec:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        return SimSpec(
            n_examples=int(obj["n_examples"]),
            n_classes=int(obj["n_classes"]),
            n_runs=int(obj.get("n_runs", len(obj["accuracies"]))),
            accuracies=tuple(obj["accuracies"]),
            error_overlap=float(obj.get("error_overlap", obj.get("rho", 0.5))),
            seed=int(obj.get("seed", 0)),
            shared_error_labels=bool(obj.get("shared_error_labels", True)),
        )
    except KeyError as exc:
        raise InfeasibleSpec(f"{path}: missing field {exc.args[0]!r}") from exc


def synthesize_runs(spec: SimSpec) -> RunCollection:
    n, k = spec.n_examples, spec.n_classes
    errors = spec.error_counts()
    labels = [f"c{c}" for c in range(k)]
    ids = [f"x{x + 1}" for x in range(n)]
    gold = [x % k for x in range(n)]

    rng = SplitMix64.substream(spec.seed, 0)
    order = rng.shuffled(range(n))
    core_size = math.floor(spec.error_overlap * max(errors))
    core, outside = order[:core_size], order[core_size:]
    cursor = rng.below(len(outside)) if outside else 0

    def wrong_label(run: int, x: int) -> int:
        stream = (SplitMix64.substream(spec.seed, 1, x) if spec.shared_error_labels
                  else SplitMix64.substream(spec.seed, 2, run, x))
        return (gold[x] + 1 + stream.below(k - 1)) % k

    runs = []
    for i, e in enumerate(errors):
        shared = min(core_size, e)
        extra = e - shared
        err = core[:shared] + [outside[(cursor + t) % len(outside)] for t in range(extra)]
        cursor += extra
        preds = list(gold)
        for x in err:
            preds[x] = wrong_label(i, x)
        runs.append(ClassificationRun(f"run{i + 1}", {ids[x]: labels[p] for x, p in enumerate(preds)}))
    eval_set = EvaluationSet(tuple(zip(ids, (labels[g] for g in gold))), tuple(labels))
    return RunCollection(eval_set, tuple(runs))


# --------------------------------------------------------------------------
# exhaustive oracle


@lru_cache(maxsize=None)
def _agreement_options(k: int, right_i: bool, right_j: bool) -> FrozenSet[int]:
    """Possible disagreement values (0/1) on one item given who is right."""
    gold = 0
    choices_i = [gold] if right_i else [c for c in range(k) if c != gold]
    choices_j = [gold] if right_j else [c for c in range(k) if c != gold]
    return frozenset(int(a != b) for a, b in product(choices_i, choices_j))


def brute_force_churn_extrema(n_examples: int, n_classes: int,
                              correct_counts: Tuple[int, int]) -> Tuple[Fraction, Fraction]:
    """Exact min and max churn over every pair of runs with the given correct counts.

    Enumerates which items each run gets right; the wrong labels are enumerated
    per item (items are independent once correctness is fixed).
    """
    n, k = n_examples, n_classes
    c_i, c_j = correct_counts
    if n > MAX_ORACLE_EXAMPLES or k > MAX_ORACLE_CLASSES:
        raise InstanceTooLarge(
            f"exhaustive search limited to n <= {MAX_ORACLE_EXAMPLES}, K <= {MAX_ORACLE_CLASSES}"
        )
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and K >= 2")
    if not (0 <= c_i <= n and 0 <= c_j <= n):
        raise ValueError(f"correct counts {correct_counts} outside 0..{n}")
    lo, hi = n + 1, -1
    for right_i in combinations(range(n), c_i):
        set_i = set(right_i)
        for right_j in combinations(range(n), c_j):
            set_j = set(right_j)
            low = high = 0
            for x in range(n):
                opts = _agreement_options(k, x in set_i, x in set_j)
                low += min(opts)
                high += max(opts)
            lo, hi = min(lo, low), max(hi, high)
    return Fraction(lo, n), Fraction(hi, n)
