"""Simulated continuous data updates: N independent drops of r% from one base set.

Stratified drops apportion the ``k`` removed items across classes by largest
remainder, then sample uniformly without replacement inside each class. Each
split uses its own substream ``derive_seed(seed, split_index)``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple

from .core import Label, PathLike, _field, iter_jsonl, write_jsonl
from .errors import ClassEmptied, DropTooLarge, DropTooSmall, DuplicateId, EmptyInput
from .rng import MASK64, SplitMix64

STRATEGIES = ("stratified", "uniform")


@dataclass(frozen=True)
class LabeledItem:
    example_id: str
    payload: str
    label: Label


@dataclass(frozen=True)
class LabeledDataset:
    items: Tuple[LabeledItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        seen = set()
        for item in self.items:
            if item.example_id in seen:
                raise DuplicateId(f"duplicate example id {item.example_id!r}")
            seen.add(item.example_id)
            if not item.label:
                raise ValueError(f"empty label on {item.example_id!r}")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def ids(self) -> List[str]:
        return [it.example_id for it in self.items]

    def class_counts(self) -> Counter:
        return Counter(it.label for it in self.items)


@dataclass(frozen=True)
class CduPlan:
    r: float = 0.01
    n: int = 10
    seed: int = 0
    strategy: str = "stratified"

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise ValueError(f"drop fraction r must lie in (0, 1), got {self.r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")

    def drop_count(self, size: int) -> int:
        """``round(r * size)`` with halves rounded up, on the decimal value of ``r``."""
        return math.floor(Fraction(repr(self.r)) * size + Fraction(1, 2))


@dataclass(frozen=True)
class CduSplit:
    index: int
    dataset: LabeledDataset
    dropped_ids: Tuple[str, ...]


def largest_remainder(counts: Dict[Label, int], k: int) -> Dict[Label, int]:
    """Apportion ``k`` seats across classes proportionally to ``counts``.

    Leftover seats go to the largest fractional quotas; ties prefer the larger
    class, then the lexicographically smaller label.
    """
    total = sum(counts.values())
    quotas = {c: Fraction(k * n, total) for c, n in counts.items()}
    alloc = {c: math.floor(q) for c, q in quotas.items()}
    leftover = k - sum(alloc.values())
    order = sorted(counts, key=lambda c: (-(quotas[c] - alloc[c]), -counts[c], c))
    for c in order[:leftover]:
        alloc[c] += 1
    return alloc


def plan_drop(dataset: LabeledDataset, plan: CduPlan) -> Tuple[int, Dict[Label, int]]:
    """Validate the plan against the dataset; return ``k`` and per-class allocations."""
    size = len(dataset)
    if size == 0:
        raise EmptyInput("dataset is empty")
    k = plan.drop_count(size)
    if k == 0:
        raise DropTooSmall(f"r={plan.r} drops round({plan.r} * {size}) = 0 items")
    if k >= size:
        raise DropTooLarge(f"r={plan.r} drops {k} of {size} items")
    if plan.strategy == "uniform":
        return k, {}
    counts = dataset.class_counts()
    alloc = largest_remainder(dict(counts), k)
    for label, drop in alloc.items():
        if drop >= counts[label]:
            raise ClassEmptied(f"dropping {drop} items would empty class {label!r} (size {counts[label]})")
    return k, alloc


def _draw_split(dataset: LabeledDataset, plan: CduPlan, index: int, k: int,
                alloc: Dict[Label, int]) -> CduSplit:
    rng = SplitMix64.substream(plan.seed, index)
    if plan.strategy == "uniform":
        drop_pos = set(rng.sample_indices(len(dataset), k))
    else:
        by_class: Dict[Label, List[int]] = {}
        for pos, item in enumerate(dataset.items):
            by_class.setdefault(item.label, []).append(pos)
        drop_pos = set()
        for label in sorted(by_class):
            members = by_class[label]
            drop_pos.update(members[t] for t in rng.sample_indices(len(members), alloc[label]))
    kept = tuple(it for pos, it in enumerate(dataset.items) if pos not in drop_pos)
    dropped = tuple(dataset.items[pos].example_id for pos in sorted(drop_pos))
    return CduSplit(index, LabeledDataset(kept), dropped)


def generate_cdu_splits(dataset: LabeledDataset, plan: CduPlan) -> List[LabeledDataset]:
    """Return ``plan.n`` datasets, each ``|D| - k`` items in the original order."""
    return [s.dataset for s in generate_cdu(dataset, plan)]


def generate_cdu(dataset: LabeledDataset, plan: CduPlan) -> List[CduSplit]:
    """Like :func:`generate_cdu_splits` but keeps the dropped ids for auditing."""
    k, alloc = plan_drop(dataset, plan)
    return [_draw_split(dataset, plan, i, k, alloc) for i in range(1, plan.n + 1)]


# --------------------------------------------------------------------------
# files


def read_dataset(path: PathLike) -> LabeledDataset:
    items = []
    for lineno, obj in iter_jsonl(path):
        text = obj.get("text", "")
        items.append(LabeledItem(
            _field(obj, "id", path, lineno),
            text if isinstance(text, str) else json.dumps(text),
            _field(obj, "label", path, lineno),
        ))
    return LabeledDataset(tuple(items))


def write_dataset(path: PathLike, dataset: LabeledDataset) -> Path:
    return write_jsonl(path, (
        {"id": it.example_id, "text": it.payload, "label": it.label} for it in dataset.items
    ))


def write_cdu(dataset: LabeledDataset, plan: CduPlan, out_dir: PathLike, stem: str) -> Tuple[List[Path], Path]:
    """Write ``<stem>.cdu<i>.jsonl`` for each split plus ``<stem>.cdu.manifest.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    k, alloc = plan_drop(dataset, plan)
    splits = [_draw_split(dataset, plan, i, k, alloc) for i in range(1, plan.n + 1)]
    paths = [write_dataset(out_dir / f"{stem}.cdu{s.index}.jsonl", s.dataset) for s in splits]
    manifest = {
        "plan": asdict(plan),
        "base_size": len(dataset),
        "k": k,
        "split_size": len(dataset) - k,
        "allocations": dict(sorted(alloc.items())),
        "rng": "splitmix64; split stream = derive_seed(seed, split_index)",
        "splits": [
            {"index": s.index, "file": p.name, "dropped_ids": list(s.dropped_ids)}
            for s, p in zip(splits, paths)
        ],
    }
    manifest_path = out_dir / f"{stem}.cdu.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return paths, manifest_path
