"""Domain types, alignment validation and JSONL ingestion.

Predictions are aligned to the evaluation set by example id, never by line
order. Rates are kept as exact :class:`~fractions.Fraction` counts ratios; the
metric functions convert to float only at the end.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DuplicateId,
    EmptyEvalSet,
    LengthMismatch,
    MissingExample,
    ParseError,
    UnknownExample,
    UnknownLabel,
    UnknownLabelWarning,
)

Label = str
PathLike = Union[str, Path]


def _check_label(value, what: str) -> Label:
    if not isinstance(value, str) or not value:
        raise UnknownLabel(f"{what}: labels must be non-empty strings, got {value!r}")
    return value


def _check_alignment(expected_ids: Sequence[str], predicted: Mapping, run_id: str) -> None:
    if len(predicted) == len(expected_ids) and all(i in predicted for i in expected_ids):
        return
    for example_id in expected_ids:
        if example_id not in predicted:
            raise MissingExample(example_id, run_id)
    known = set(expected_ids)
    for example_id in predicted:
        if example_id not in known:
            raise UnknownExample(example_id, run_id)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class EvaluationSet:
    """Ordered ``(example_id, gold)`` pairs plus the task's label alphabet."""

    examples: Tuple[Tuple[str, Label], ...]
    label_alphabet: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple((str(i), g) for i, g in self.examples))
        object.__setattr__(self, "label_alphabet", tuple(self.label_alphabet))
        if not self.examples:
            raise EmptyEvalSet("evaluation set has no examples")
        if len(set(self.label_alphabet)) != len(self.label_alphabet):
            raise DuplicateId("label alphabet contains duplicates")
        for label in self.label_alphabet:
            _check_label(label, "alphabet")
        alphabet = set(self.label_alphabet)
        seen = set()
        for example_id, gold in self.examples:
            if example_id in seen:
                raise DuplicateId(f"duplicate example id {example_id!r}")
            seen.add(example_id)
            _check_label(gold, f"gold label of {example_id!r}")
            if gold not in alphabet:
                raise UnknownLabel(f"gold label {gold!r} of {example_id!r} is not in the alphabet")

    @classmethod
    def from_gold(cls, gold: Mapping[str, Label] | Iterable[Tuple[str, Label]],
                  alphabet: Optional[Sequence[Label]] = None) -> "EvaluationSet":
        pairs = list(gold.items()) if isinstance(gold, Mapping) else list(gold)
        if alphabet is None:
            alphabet = list(dict.fromkeys(g for _, g in pairs))
        return cls(tuple(pairs), tuple(alphabet))

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(i for i, _ in self.examples)

    @property
    def gold(self) -> Dict[str, Label]:
        return dict(self.examples)

    def __len__(self) -> int:
        return len(self.examples)


@dataclass(frozen=True)
class ClassificationRun:
    run_id: str
    predictions: Mapping[str, Label]

    def __post_init__(self):
        object.__setattr__(self, "predictions", dict(self.predictions))


@dataclass(frozen=True)
class RunCollection:
    """N classification runs aligned to one evaluation set."""

    eval_set: EvaluationSet
    runs: Tuple[ClassificationRun, ...]

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        if not self.runs:
            raise ValueError("a run collection needs at least one run")
        run_ids = [r.run_id for r in self.runs]
        if len(set(run_ids)) != len(run_ids):
            raise DuplicateId(f"duplicate run ids in {run_ids}")
        ids = self.eval_set.ids
        alphabet = set(self.eval_set.label_alphabet)
        for run in self.runs:
            _check_alignment(ids, run.predictions, run.run_id)
            stray = {p for p in run.predictions.values() if p not in alphabet}
            for label in sorted(stray):
                _check_label(label, f"prediction in run {run.run_id!r}")
                warnings.warn(
                    f"run {run.run_id!r} predicts label {label!r} outside the alphabet",
                    UnknownLabelWarning,
                    stacklevel=3,
                )

    @classmethod
    def from_lists(cls, gold: Sequence[Label], runs: Sequence[Sequence[Label]],
                   run_ids: Optional[Sequence[str]] = None,
                   alphabet: Optional[Sequence[Label]] = None) -> "RunCollection":
        """Build a collection from positional label lists (ids ``x1..xn``)."""
        ids = [f"x{k + 1}" for k in range(len(gold))]
        eval_set = EvaluationSet.from_gold(zip(ids, gold), alphabet)
        run_ids = list(run_ids) if run_ids is not None else [f"run{k + 1}" for k in range(len(runs))]
        return cls(eval_set, tuple(
            ClassificationRun(rid, dict(zip(ids, preds))) for rid, preds in zip(run_ids, runs)
        ))

    @property
    def n_runs(self) -> int:
        return len(self.runs)

    @property
    def n_examples(self) -> int:
        return len(self.eval_set)

    @property
    def run_ids(self) -> Tuple[str, ...]:
        return tuple(r.run_id for r in self.runs)

    @cached_property
    def label_index(self) -> Dict[Label, int]:
        """Alphabet labels first, then out-of-alphabet predictions in first-seen order."""
        index = {label: k for k, label in enumerate(self.eval_set.label_alphabet)}
        for run in self.runs:
            for example_id in self.eval_set.ids:
                index.setdefault(run.predictions[example_id], len(index))
        return index

    @cached_property
    def codes(self) -> np.ndarray:
        """``(n_runs, n_examples)`` integer-coded predictions in eval-set order."""
        index = self.label_index
        ids = self.eval_set.ids
        out = np.array(
            [[index[run.predictions[i]] for i in ids] for run in self.runs], dtype=np.int64
        )
        out.setflags(write=False)
        return out

    @cached_property
    def gold_codes(self) -> np.ndarray:
        index = self.label_index
        out = np.array([index[g] for _, g in self.eval_set.examples], dtype=np.int64)
        out.setflags(write=False)
        return out


# --------------------------------------------------------------------------
# sequence labeling


@dataclass(frozen=True)
class SequenceExample:
    example_id: str
    tokens: Tuple[str, ...]
    gold: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "gold", tuple(self.gold))
        if len(self.tokens) != len(self.gold):
            raise LengthMismatch(
                f"example {self.example_id!r} has {len(self.tokens)} tokens but {len(self.gold)} gold tags"
            )


@dataclass(frozen=True)
class SequenceRun:
    run_id: str
    predictions: Mapping[str, Tuple[Label, ...]]

    def __post_init__(self):
        object.__setattr__(self, "predictions", {k: tuple(v) for k, v in self.predictions.items()})


@dataclass(frozen=True)
class SequenceRunCollection:
    eval_set: Tuple[SequenceExample, ...]
    runs: Tuple[SequenceRun, ...]

    def __post_init__(self):
        object.__setattr__(self, "eval_set", tuple(self.eval_set))
        object.__setattr__(self, "runs", tuple(self.runs))
        if not self.runs:
            raise ValueError("a run collection needs at least one run")
        run_ids = [r.run_id for r in self.runs]
        if len(set(run_ids)) != len(run_ids):
            raise DuplicateId(f"duplicate run ids in {run_ids}")
        ids = [ex.example_id for ex in self.eval_set]
        if len(set(ids)) != len(ids):
            raise DuplicateId("duplicate example ids in sequence evaluation set")
        if self.n_tokens < 1:
            raise EmptyEvalSet("sequence evaluation set has no tokens")
        for run in self.runs:
            _check_alignment(ids, run.predictions, run.run_id)
            for ex in self.eval_set:
                got = len(run.predictions[ex.example_id])
                if got != len(ex.tokens):
                    raise LengthMismatch(
                        f"run {run.run_id!r} predicts {got} tags for example {ex.example_id!r} "
                        f"with {len(ex.tokens)} tokens"
                    )

    @property
    def n_runs(self) -> int:
        return len(self.runs)

    @property
    def n_tokens(self) -> int:
        return sum(len(ex.tokens) for ex in self.eval_set)

    @property
    def run_ids(self) -> Tuple[str, ...]:
        return tuple(r.run_id for r in self.runs)

    @cached_property
    def label_index(self) -> Dict[Label, int]:
        index: Dict[Label, int] = {}
        for ex in self.eval_set:
            for tag in ex.gold:
                index.setdefault(tag, len(index))
        for run in self.runs:
            for ex in self.eval_set:
                for tag in run.predictions[ex.example_id]:
                    index.setdefault(tag, len(index))
        return index

    @cached_property
    def codes(self) -> np.ndarray:
        """``(n_runs, n_tokens)`` integer-coded tags, examples concatenated in order."""
        index = self.label_index
        out = np.array(
            [[index[t] for ex in self.eval_set for t in run.predictions[ex.example_id]]
             for run in self.runs],
            dtype=np.int64,
        ).reshape(len(self.runs), self.n_tokens)
        out.setflags(write=False)
        return out

    @cached_property
    def gold_codes(self) -> np.ndarray:
        index = self.label_index
        out = np.array([index[t] for ex in self.eval_set for t in ex.gold], dtype=np.int64)
        out.setflags(write=False)
        return out

    def as_classification(self) -> RunCollection:
        """The induced classification problem; only defined when every sequence has length 1."""
        if any(len(ex.tokens) != 1 for ex in self.eval_set):
            raise LengthMismatch("only collections of length-1 sequences induce a classification problem")
        eval_set = EvaluationSet.from_gold((ex.example_id, ex.gold[0]) for ex in self.eval_set)
        runs = tuple(
            ClassificationRun(run.run_id, {k: v[0] for k, v in run.predictions.items()})
            for run in self.runs
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnknownLabelWarning)
            return RunCollection(eval_set, runs)


# --------------------------------------------------------------------------
# accuracy


@dataclass(frozen=True)
class RunAccuracy:
    run_id: str
    correct: int
    total: int

    def __post_init__(self):
        if self.total < 1 or not 0 <= self.correct <= self.total:
            raise ValueError(f"invalid accuracy counts {self.correct}/{self.total}")

    @property
    def accuracy(self) -> Fraction:
        return Fraction(self.correct, self.total)

    @property
    def error_rate(self) -> Fraction:
        return 1 - self.accuracy


@dataclass(frozen=True)
class AccuracyProfile:
    per_run: Tuple[RunAccuracy, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_run", tuple(self.per_run))

    @classmethod
    def from_accuracies(cls, accuracies: Sequence[float | Fraction | str], n_examples: int,
                        run_ids: Optional[Sequence[str]] = None) -> "AccuracyProfile":
        """Profile from accuracy fractions; each ``a * n_examples`` must be a whole count."""
        run_ids = run_ids or [f"run{k + 1}" for k in range(len(accuracies))]
        entries = []
        for rid, acc in zip(run_ids, accuracies):
            exact = Fraction(str(acc)) if isinstance(acc, float) else Fraction(acc)
            count = exact * n_examples
            if count.denominator != 1:
                raise ValueError(f"accuracy {acc} is not a whole count out of {n_examples}")
            entries.append(RunAccuracy(rid, int(count), n_examples))
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.per_run)

    @property
    def accuracies(self) -> List[Fraction]:
        return [r.accuracy for r in self.per_run]

    @property
    def error_rates(self) -> List[Fraction]:
        return [r.error_rate for r in self.per_run]


def accuracy_profile(collection: RunCollection | SequenceRunCollection) -> AccuracyProfile:
    """Per-run accuracy; token-level for sequence collections.

    Predictions outside the alphabet never equal a gold label, so they count as errors.
    """
    hits = (collection.codes == collection.gold_codes[None, :]).sum(axis=1)
    total = collection.codes.shape[1]
    return AccuracyProfile(tuple(
        RunAccuracy(rid, int(c), total) for rid, c in zip(collection.run_ids, hits)
    ))


# --------------------------------------------------------------------------
# JSONL ingestion


def iter_jsonl(path: PathLike) -> Iterator[Tuple[int, dict]]:
    """Yield ``(line_number, object)`` for every non-blank line."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc.strerror or exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(path, lineno, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ParseError(path, lineno, "expected a JSON object")
        yield lineno, obj


def _field(obj: dict, key: str, path, lineno: int, kind=str):
    if key not in obj:
        raise ParseError(path, lineno, f"missing key {key!r}")
    value = obj[key]
    if kind is str:
        if not isinstance(value, str) or not value:
            raise ParseError(path, lineno, f"{key!r} must be a non-empty string")
    elif kind is list:
        if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
            raise ParseError(path, lineno, f"{key!r} must be a list of non-empty strings")
    return value


def read_gold(path: PathLike) -> EvaluationSet:
    alphabet = None
    pairs: List[Tuple[str, Label]] = []
    seen = set()
    for lineno, obj in iter_jsonl(path):
        if not pairs and alphabet is None and "alphabet" in obj and "id" not in obj:
            alphabet = _field(obj, "alphabet", path, lineno, list)
            continue
        example_id = _field(obj, "id", path, lineno)
        gold = _field(obj, "gold", path, lineno)
        if example_id in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate example id {example_id!r}")
        seen.add(example_id)
        pairs.append((example_id, gold))
    if not pairs:
        raise EmptyEvalSet(f"{path}: gold file has no examples")
    try:
        return EvaluationSet.from_gold(pairs, alphabet)
    except UnknownLabel as exc:
        raise UnknownLabel(f"{path}: {exc}") from exc


def read_run(path: PathLike, run_id: Optional[str] = None) -> ClassificationRun:
    predictions: Dict[str, Label] = {}
    for lineno, obj in iter_jsonl(path):
        example_id = _field(obj, "id", path, lineno)
        if example_id in predictions:
            raise DuplicateId(f"{path}:{lineno}: duplicate example id {example_id!r}")
        predictions[example_id] = _field(obj, "pred", path, lineno)
    return ClassificationRun(run_id or Path(path).stem, predictions)


def _run_ids(run_files: Sequence[PathLike], run_ids: Optional[Sequence[str]]) -> List[str]:
    if run_ids is None:
        return [Path(p).stem for p in run_files]
    if len(run_ids) != len(run_files):
        raise ValueError("need exactly one run id per run file")
    return list(run_ids)


def ingest_classification(run_files: Sequence[PathLike], gold_file: PathLike,
                          run_ids: Optional[Sequence[str]] = None) -> RunCollection:
    """Read a gold file and N run files into an aligned :class:`RunCollection`.

    Run order follows ``run_files``; run ids default to the file stems.
    """
    eval_set = read_gold(gold_file)
    runs = tuple(read_run(p, rid) for p, rid in zip(run_files, _run_ids(run_files, run_ids)))
    return RunCollection(eval_set, runs)


def read_sequence_gold(path: PathLike) -> Tuple[SequenceExample, ...]:
    examples: List[SequenceExample] = []
    seen = set()
    for lineno, obj in iter_jsonl(path):
        example_id = _field(obj, "id", path, lineno)
        tokens = _field(obj, "tokens", path, lineno, list)
        gold = _field(obj, "gold", path, lineno, list)
        if example_id in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate example id {example_id!r}")
        seen.add(example_id)
        if len(tokens) != len(gold):
            raise LengthMismatch(f"{path}:{lineno}: {len(tokens)} tokens but {len(gold)} gold tags")
        examples.append(SequenceExample(example_id, tokens, gold))
    if not examples:
        raise EmptyEvalSet(f"{path}: gold file has no examples")
    return tuple(examples)


def read_sequence_run(path: PathLike, run_id: Optional[str] = None,
                      lengths: Optional[Mapping[str, int]] = None) -> SequenceRun:
    predictions: Dict[str, Tuple[Label, ...]] = {}
    for lineno, obj in iter_jsonl(path):
        example_id = _field(obj, "id", path, lineno)
        if example_id in predictions:
            raise DuplicateId(f"{path}:{lineno}: duplicate example id {example_id!r}")
        tags = _field(obj, "pred", path, lineno, list)
        if lengths is not None and example_id in lengths and len(tags) != lengths[example_id]:
            raise LengthMismatch(
                f"{path}:{lineno}: {len(tags)} predicted tags for example {example_id!r} "
                f"with {lengths[example_id]} tokens"
            )
        predictions[example_id] = tuple(tags)
    return SequenceRun(run_id or Path(path).stem, predictions)


def ingest_sequence(run_files: Sequence[PathLike], gold_file: PathLike,
                    run_ids: Optional[Sequence[str]] = None) -> SequenceRunCollection:
    examples = read_sequence_gold(gold_file)
    lengths = {ex.example_id: len(ex.tokens) for ex in examples}
    runs = tuple(
        read_sequence_run(p, rid, lengths)
        for p, rid in zip(run_files, _run_ids(run_files, run_ids))
    )
    return SequenceRunCollection(examples, runs)


# --------------------------------------------------------------------------
# JSONL emission


def write_jsonl(path: PathLike, rows: Iterable[dict]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def write_gold(path: PathLike, eval_set: EvaluationSet) -> Path:
    rows = [{"alphabet": list(eval_set.label_alphabet)}]
    rows += [{"id": i, "gold": g} for i, g in eval_set.examples]
    return write_jsonl(path, rows)


def write_run(path: PathLike, run: ClassificationRun, order: Optional[Sequence[str]] = None) -> Path:
    order = order if order is not None else list(run.predictions)
    return write_jsonl(path, ({"id": i, "pred": run.predictions[i]} for i in order))


def write_classification(collection: RunCollection, directory: PathLike,
                         gold_name: str = "gold.jsonl") -> Tuple[Path, List[Path]]:
    """Emit a collection as one gold file and one run file per run (named by run id)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    gold_path = write_gold(directory / gold_name, collection.eval_set)
    ids = collection.eval_set.ids
    run_paths = [write_run(directory / f"{r.run_id}.jsonl", r, ids) for r in collection.runs]
    return gold_path, run_paths


def write_sequence(collection: SequenceRunCollection, directory: PathLike,
                   gold_name: str = "gold.jsonl") -> Tuple[Path, List[Path]]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    gold_path = write_jsonl(directory / gold_name, (
        {"id": ex.example_id, "tokens": list(ex.tokens), "gold": list(ex.gold)}
        for ex in collection.eval_set
    ))
    run_paths = [
        write_jsonl(directory / f"{run.run_id}.jsonl", (
            {"id": ex.example_id, "pred": list(run.predictions[ex.example_id])}
            for ex in collection.eval_set
        ))
        for run in collection.runs
    ]
    return gold_path, run_paths
