"""Rendering of jitter reports, bound tables and error-rate/jitter trade-off data.

JSON and CSV carry fractions with full float precision and parse back to equal
objects. Only the text format shows percentages, rounded half-to-even to two
decimals.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from .core import AccuracyProfile, PathLike
from .errors import EmptyInput, ParseError
from .metrics import JitterReport, PairwiseJitter, min_jitter_bound_exact, max_jitter_bound_exact, pairwise_bounds

FORMATS = ("text", "json", "csv")


def pct(value, places: int = 2) -> str:
    """Percentage string of a fraction, rounded half-to-even."""
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(value)
    return f"{(d * 100).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)}%"


def _csv_text(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# jitter reports


def report_to_json(report: JitterReport) -> dict:
    return {
        "n_runs": report.n_runs,
        f"n_{report.unit}": report.size,
        "run_ids": list(report.run_ids),
        "pairwise": [{"i": p.run_i, "j": p.run_j, "jitter": p.value} for p in report.pairwise],
        "jitter": report.jitter,
        "min_bound": report.min_bound,
        "max_bound": report.max_bound,
        "accuracy": list(report.accuracy),
        "accuracy_stddev": report.accuracy_stddev,
    }


def report_from_json(obj: Mapping) -> JitterReport:
    unit = "tokens" if "n_tokens" in obj else "examples"
    pairwise = tuple(PairwiseJitter(p["i"], p["j"], float(p["jitter"])) for p in obj["pairwise"])
    run_ids = obj.get("run_ids")
    if run_ids is None:
        run_ids = list(dict.fromkeys([p.run_i for p in pairwise] + [p.run_j for p in pairwise]))
    return JitterReport(
        run_ids=tuple(run_ids),
        unit=unit,
        size=int(obj[f"n_{unit}"]),
        pairwise=pairwise,
        jitter=float(obj["jitter"]),
        min_bound=float(obj["min_bound"]),
        max_bound=float(obj["max_bound"]),
        accuracy=tuple(float(a) for a in obj["accuracy"]),
        accuracy_stddev=float(obj["accuracy_stddev"]),
    )


def report_to_csv(report: JitterReport) -> str:
    rows: List[list] = [[f"n_{report.unit}", "", "", report.size]]
    rows += [["accuracy", rid, "", repr(a)] for rid, a in zip(report.run_ids, report.accuracy)]
    rows += [["pair", p.run_i, p.run_j, repr(p.value)] for p in report.pairwise]
    rows += [
        ["jitter", "", "", repr(report.jitter)],
        ["min_bound", "", "", repr(report.min_bound)],
        ["max_bound", "", "", repr(report.max_bound)],
        ["accuracy_stddev", "", "", repr(report.accuracy_stddev)],
    ]
    return _csv_text(rows, ["kind", "i", "j", "value"])


def report_from_csv(text: str) -> JitterReport:
    fields: Dict[str, float] = {}
    run_ids, accuracy, pairwise = [], [], []
    unit, size = "examples", 0
    for row in csv.DictReader(io.StringIO(text)):
        kind = row["kind"]
        if kind in ("n_examples", "n_tokens"):
            unit, size = kind[2:], int(row["value"])
        elif kind == "accuracy":
            run_ids.append(row["i"])
            accuracy.append(float(row["value"]))
        elif kind == "pair":
            pairwise.append(PairwiseJitter(row["i"], row["j"], float(row["value"])))
        else:
            fields[kind] = float(row["value"])
    return JitterReport(
        run_ids=tuple(run_ids), unit=unit, size=size, pairwise=tuple(pairwise),
        jitter=fields["jitter"], min_bound=fields["min_bound"], max_bound=fields["max_bound"],
        accuracy=tuple(accuracy), accuracy_stddev=fields["accuracy_stddev"],
    )


def _report_text(report: JitterReport) -> str:
    width = max(len(r) for r in report.run_ids)
    lines = [
        f"jitter report: {report.n_runs} runs over {report.size} {report.unit}",
        f"jitter (J)           {pct(report.jitter)}",
        f"accuracy stddev (V)  {pct(report.accuracy_stddev)}",
        "",
        "Minimum (min) and maximum (max) jitter",
        f"min {pct(report.min_bound)}",
        f"max {pct(report.max_bound)}",
        "",
        "accuracy",
    ]
    lines += [f"  {rid:<{width}}  {pct(a)}" for rid, a in zip(report.run_ids, report.accuracy)]
    lines.append("pairwise jitter")
    lines += [f"  {p.run_i:<{width}}  {p.run_j:<{width}}  {pct(p.value)}" for p in report.pairwise]
    return "\n".join(lines) + "\n"


def render_jitter_report(report: JitterReport, fmt: str = "text") -> str:
    if fmt == "text":
        return _report_text(report)
    if fmt == "json":
        return json.dumps(report_to_json(report), indent=2) + "\n"
    if fmt == "csv":
        return report_to_csv(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def render_bounds_table(profile: AccuracyProfile, places: int = 2) -> str:
    """Per-pair min/max jitter implied by accuracies, with an average row."""
    accs = {r.run_id: r.accuracy for r in profile.per_run}
    rows = [(f"{i} ({pct(accs[i], 0)}) - {j} ({pct(accs[j], 0)})", lo, hi)
            for i, j, lo, hi in pairwise_bounds(profile)]
    rows.append(("Avg", min_jitter_bound_exact(profile), max_jitter_bound_exact(profile)))
    width = max(len(r[0]) for r in rows)
    out = [f"{'pair':<{width}}  {'min (%)':>9}  {'max (%)':>9}"]
    for name, lo, hi in rows:
        out.append(f"{name:<{width}}  {pct(lo, places)[:-1]:>9}  {pct(hi, places)[:-1]:>9}")
    return "\n".join(out) + "\n"


def render_comparison_table(reports: Mapping[str, JitterReport]) -> str:
    """One row per configuration: mean error rate with its stddev, and jitter."""
    width = max([len(name) for name in reports] + [6])
    out = [f"{'config':<{width}}  {'ER (%)':>16}  {'J (%)':>7}"]
    for name, rep in reports.items():
        er = 1 - sum(rep.accuracy) / len(rep.accuracy)
        er_cell = f"{pct(er)[:-1]} ± {pct(rep.accuracy_stddev)[:-1]}"
        out.append(f"{name:<{width}}  {er_cell:>16}  {pct(rep.jitter)[:-1]:>7}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# trade-off data


@dataclass(frozen=True)
class TradeoffPoint:
    config_name: str
    error_rate: float
    jitter: float
    group: Optional[str] = None

    def __post_init__(self):
        for name in ("error_rate", "jitter"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be a fraction in [0, 1], got {v}")


def _dominates(a: TradeoffPoint, b: TradeoffPoint) -> bool:
    return (a.error_rate <= b.error_rate and a.jitter <= b.jitter
            and (a.error_rate < b.error_rate or a.jitter < b.jitter))


def tradeoff_rows(points: Sequence[TradeoffPoint]) -> List[dict]:
    """Rows sorted by (group, error_rate), each flagged if another point dominates it."""
    if not points:
        raise EmptyInput("no trade-off points")
    rows = [
        {"config": p.config_name, "group": p.group or "", "error_rate": p.error_rate,
         "jitter": p.jitter, "dominated": any(_dominates(q, p) for q in points)}
        for p in points
    ]
    rows.sort(key=lambda r: (r["group"], r["error_rate"], r["jitter"], r["config"]))
    return rows


def emit_tradeoff(points: Sequence[TradeoffPoint], fmt: str = "csv") -> str:
    rows = tradeoff_rows(points)
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        return _csv_text(
            [[r["config"], r["group"], repr(r["error_rate"]), repr(r["jitter"]),
              "true" if r["dominated"] else "false"] for r in rows],
            ["config", "group", "error_rate", "jitter", "dominated"],
        )
    raise ValueError(f"unknown trade-off format {fmt!r}; expected csv or json")


def parse_tradeoff(text: str, fmt: str = "csv") -> List[dict]:
    """Inverse of :func:`emit_tradeoff`."""
    if fmt == "json":
        return json.loads(text)
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({"config": row["config"], "group": row["group"],
                     "error_rate": float(row["error_rate"]), "jitter": float(row["jitter"]),
                     "dominated": row["dominated"] == "true"})
    return rows


def read_tradeoff_csv(path: PathLike) -> List[TradeoffPoint]:
    """Read ``config,[group,]error_rate,jitter`` rows."""
    path = Path(path)
    points = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"config", "error_rate", "jitter"} - set(reader.fieldnames or ())
        if missing:
            raise ParseError(path, 1, f"missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                points.append(TradeoffPoint(
                    row["config"], float(row["error_rate"]), float(row["jitter"]),
                    row.get("group") or None,
                ))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return points
