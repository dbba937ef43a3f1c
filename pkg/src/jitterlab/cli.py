"""``jitterlab`` command-line interface.

Exit codes: 0 success, 2 invalid input (any :class:`JitterLabError`, bad flags),
1 internal error. Artifacts go to stdout or ``--out``; diagnostics to stderr,
with verbosity from ``JITTERLAB_LOG`` (error, warn, info, debug).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import analysis, cdu, core, metrics, report, simulator
from .errors import JitterLabError, NeedAtLeastTwoRuns

log = logging.getLogger("jitterlab")

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
           "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("JITTERLAB_LOG", "warn").lower(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)
    logging.captureWarnings(True)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        log.info("wrote %s", out)


def _members(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated run indices, got {value!r}")


def _u64(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


# --------------------------------------------------------------------------
# subcommands


def cmd_jitter(args) -> int:
    if len(args.runs) < 2:
        raise NeedAtLeastTwoRuns(f"jitter needs at least two run files, got {len(args.runs)}")
    if args.mode == "seq":
        collection = core.ingest_sequence(args.runs, args.gold, args.run_ids)
    else:
        collection = core.ingest_classification(args.runs, args.gold, args.run_ids)
    _emit(report.render_jitter_report(metrics.jitter_report(collection), args.format), args.out)
    return 0


def cmd_cdu(args) -> int:
    dataset = cdu.read_dataset(args.data)
    plan = cdu.CduPlan(r=args.r, n=args.n, seed=args.seed, strategy=args.strategy)
    out_dir = args.out if args.out is not None else Path(args.data).parent
    stem = args.stem or Path(args.data).stem
    _, manifest = cdu.write_cdu(dataset, plan, out_dir, stem)
    sys.stdout.write(manifest.read_text(encoding="utf-8"))
    return 0


def cmd_simulate(args) -> int:
    spec = simulator.read_sim_spec(args.spec)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    collection = simulator.synthesize_runs(spec)
    gold, runs = core.write_classification(collection, args.out)
    sys.stdout.write(json.dumps({"gold": str(gold), "runs": [str(p) for p in runs]}, indent=2) + "\n")
    return 0


def cmd_oracle(args) -> int:
    lo, hi = simulator.brute_force_churn_extrema(args.n, args.k, (args.ci, args.cj))
    if args.format == "json":
        text = json.dumps({"min": float(lo), "max": float(hi),
                           "min_exact": str(lo), "max_exact": str(hi)}) + "\n"
    else:
        text = f"min={float(lo):.4f} max={float(hi):.4f}\n"
    _emit(text, args.out)
    return 0


def cmd_overlap(args) -> int:
    coll_a = core.ingest_classification(args.runs_a, args.gold)
    coll_b = core.ingest_classification(args.runs_b, args.gold)
    table = analysis.overlap_table(coll_a, coll_b, tuple(args.names))
    if args.format == "text":
        t = table.to_json()
        text = "pair\t2C\t3C\t4C\t>4C\ttotal\n" + "\t".join(
            [f"({t['pair'][0]}, {t['pair'][1]})"] + [str(t[b]) for b in analysis.BUCKETS] + [str(t["total"])]
        ) + "\n"
    else:
        text = json.dumps(table.to_json()) + "\n"
    _emit(text, args.out)
    return 0


def _run_jsonl(run: core.ClassificationRun, order: Sequence[str]) -> str:
    return "".join(json.dumps({"id": i, "pred": run.predictions[i]}, ensure_ascii=False) + "\n"
                   for i in order)


def cmd_ensemble(args) -> int:
    collection = core.ingest_classification(args.runs, args.gold)
    ids = collection.eval_set.ids
    if args.window is not None:
        if args.out is None:
            raise JitterLabError("--window writes one file per ensemble and needs --out DIR")
        ensembles = analysis.window_ensembles(collection, args.window)
        args.out.mkdir(parents=True, exist_ok=True)
        paths = [core.write_run(args.out / f"{r.run_id}.jsonl", r, ids) for r in ensembles.runs]
        sys.stdout.write(json.dumps([str(p) for p in paths], indent=2) + "\n")
        return 0
    members = args.members if args.members is not None else list(range(min(5, collection.n_runs)))
    run = analysis.ensemble_predict(collection, members, args.run_id)
    _emit(_run_jsonl(run, ids), args.out)
    return 0


def cmd_tradeoff(args) -> int:
    points = report.read_tradeoff_csv(getattr(args, "in"))
    _emit(report.emit_tradeoff(points, args.format), args.out)
    return 0


def cmd_complexity(args) -> int:
    points = analysis.read_complexity_csv(getattr(args, "in"))
    r = analysis.complexity_correlation(points)
    text = json.dumps({"n_points": len(points), "pearson_r": r}) + "\n" if args.format == "json" \
        else f"pearson_r={r:.6f} over {len(points)} points\n"
    _emit(text, args.out)
    return 0


def cmd_syswide(args) -> int:
    intent_eval = core.read_gold(args.intent_gold)
    intent_run = core.read_run(args.intent_run)
    slot_eval = core.read_sequence_gold(args.slot_gold)
    slot_run = core.read_sequence_run(args.slot_run)
    intent_ok = metrics.intent_correctness(intent_run, intent_eval)
    slots_ok = metrics.slots_correctness(slot_run, slot_eval)
    acc = metrics.system_wide_accuracy(intent_ok, slots_ok)
    if args.format == "json":
        text = json.dumps({"n_examples": len(intent_ok), "system_wide_accuracy": acc,
                           "intent_accuracy": sum(intent_ok.values()) / len(intent_ok),
                           "sentence_accuracy": sum(slots_ok.values()) / len(slots_ok)}) + "\n"
    else:
        text = f"system-wide accuracy {report.pct(acc)} over {len(intent_ok)} examples\n"
    _emit(text, args.out)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jitterlab", description="Model stability (jitter) toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jitter", help="jitter, bounds and accuracy spread over N runs")
    p.add_argument("--mode", choices=("class", "seq"), default="class")
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--runs", type=Path, nargs="+", required=True)
    p.add_argument("--run-ids", nargs="+")
    p.add_argument("--format", choices=report.FORMATS, default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_jitter)

    p = sub.add_parser("cdu", help="generate N perturbed training sets")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--r", type=float, default=0.01)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--strategy", choices=cdu.STRATEGIES, default="stratified")
    p.add_argument("--stem")
    p.add_argument("--out", type=Path, help="output directory (default: next to --data)")
    p.set_defaults(func=cmd_cdu)

    p = sub.add_parser("simulate", help="synthesize a run collection from a JSON SimSpec")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exhaustive min/max churn for two runs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ci", type=int, required=True)
    p.add_argument("--cj", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("overlap", help="shared unstable examples of two collections")
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--runs-a", type=Path, nargs="+", required=True)
    p.add_argument("--runs-b", type=Path, nargs="+", required=True)
    p.add_argument("--names", nargs=2, default=("A", "B"))
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("ensemble", help="majority-vote ensemble of runs")
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--runs", type=Path, nargs="+", required=True)
    p.add_argument("--members", type=_members, help="comma-separated 0-based run indices (default: first 5)")
    p.add_argument("--window", type=int, help="emit one ensemble per sliding window of this many runs")
    p.add_argument("--run-id")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("tradeoff", help="error-rate/jitter points with a dominated flag")
    p.add_argument("--in", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("complexity", help="Pearson r between parameter count and jitter")
    p.add_argument("--in", type=Path, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("syswide", help="system-wide accuracy of an intent + slot pipeline")
    p.add_argument("--intent-gold", type=Path, required=True)
    p.add_argument("--intent-run", type=Path, required=True)
    p.add_argument("--slot-gold", type=Path, required=True)
    p.add_argument("--slot-run", type=Path, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_syswide)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (JitterLabError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
