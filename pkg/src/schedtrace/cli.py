"""Command-line entry point.

Subcommands: analyze, train, simulate, compare, gen-trace. Every report
embeds the tool version, the resolved configuration, and the seed, and is
written with sorted keys, so identical invocations produce byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attributes import (
    collect_job_attributes,
    collect_task_attributes,
    read_job_attributes_csv,
    read_task_attributes_csv,
    write_attributes_csv,
)
from .ingest import (
    parse_job_events,
    parse_task_events,
    parse_usage_records,
    sample_files,
    write_job_events,
    write_task_events,
    write_usage_records,
)
from .models import (
    JOB_FEATURE_NAMES,
    TASK_FEATURE_NAMES,
    ModelSpec,
    cross_validate,
    dataset_from_attributes,
    gini_importance,
    load_model,
    save_model,
    train_model,
)
from .stats import summarize
from .sim import (
    BUILTIN_SHAPES,
    Baseline,
    Predictive,
    build_workload,
    compare_results,
    default_machines,
    load_workload,
    run_simulation,
)
from .synth import SyntheticConfig, generate_synthetic_trace, trace_manifest


def _write_report(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _report_envelope(command: str, config: dict, seed: int) -> dict:
    return {"tool": "schedtrace", "version": __version__, "command": command,
            "config": config, "seed": seed}


def _write_times_csv(path: Path, summary) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["status", "metric", "min", "q1", "median", "q3", "max"])
        for metric, table in (("waiting_time", summary.waiting),
                              ("service_time", summary.service)):
            for status in sorted(table, key=lambda s: s.value):
                f = table[status]
                w.writerow([status.value, metric, f.minimum, f.q1, f.median,
                            f.q3, f.maximum])


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    in_dir = Path(args.input)
    task_files = sorted(str(p) for pat in ("task_events*.csv", "task_events*.csv.gz")
                        for p in in_dir.glob(pat))
    job_files = sorted(str(p) for pat in ("job_events*.csv", "job_events*.csv.gz")
                       for p in in_dir.glob(pat))
    usage_files = sorted(str(p) for pat in ("task_usage*.csv", "task_usage*.csv.gz")
                         for p in in_dir.glob(pat))
    if not task_files and not job_files:
        print(f"error: no input files under {in_dir}", file=sys.stderr)
        return 1
    if args.sample_fraction < 1.0 and task_files:
        task_files = sample_files(task_files, args.sample_fraction, args.seed)

    task_events = [e for path in task_files for e in parse_task_events(path)]
    job_events = [e for path in job_files for e in parse_job_events(path)]
    usage = [u for path in usage_files for u in parse_usage_records(path)]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = {
        "input": args.input,
        "sample_fraction": args.sample_fraction,
        "task_files": task_files,
        "job_files": job_files,
        "usage_files": usage_files,
    }

    task_attrs = collect_task_attributes(task_events, usage)
    job_attrs = collect_job_attributes(task_attrs, job_events)
    if task_attrs:
        write_attributes_csv(task_attrs, out / "task_attributes.csv")
        task_summary = summarize(task_attrs)
        report = _report_envelope("analyze", config, args.seed)
        report["summary"] = task_summary.as_dict()
        _write_report(out / "task_summary.json", report)
        _write_times_csv(out / "task_times.csv", task_summary)
    if job_attrs:
        write_attributes_csv(job_attrs, out / "job_attributes.csv")
        job_summary = summarize(job_attrs)
        report = _report_envelope("analyze", config, args.seed)
        report["summary"] = job_summary.as_dict()
        _write_report(out / "job_summary.json", report)
        _write_times_csv(out / "job_times.csv", job_summary)
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _model_params(args, kind: str) -> dict:
    params = {}
    if args.config:
        with open(args.config) as fh:
            params.update(json.load(fh).get(kind, {}))
    if kind in ("tree", "forest"):
        params.setdefault("max_depth", args.max_depth)
        params.setdefault("min_leaf", args.min_leaf)
    if kind == "forest":
        params.setdefault("n_trees", args.n_trees)
        if args.jobs > 1:
            params["n_jobs"] = args.jobs
    return params


def cmd_train(args) -> int:
    path = Path(args.attributes)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if "task_index" in header:
        records = read_task_attributes_csv(path)
        names = TASK_FEATURE_NAMES
        level = "task"
    else:
        records = read_job_attributes_csv(path)
        names = JOB_FEATURE_NAMES
        level = "job"
    X, y = dataset_from_attributes(records, names)

    kinds = ["forest", "tree", "glm"] if args.model == "all" else [args.model]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    combined = {}
    for kind in kinds:
        params = _model_params(args, kind)
        spec = ModelSpec(kind=kind, params=params)
        cv = cross_validate(X, y, spec, k=args.folds, seed=args.seed)
        model = train_model(spec, X, y, seed=args.seed)
        model.feature_names = list(names)
        save_model(model, out / f"model_{kind}.json")

        config = {"attributes": args.attributes, "level": level, "folds": args.folds,
                  "model": kind, "params": params, "features": list(names)}
        report = _report_envelope("train", config, args.seed)
        report["cv"] = cv.as_dict()
        _write_report(out / f"metrics_{kind}.json", report)
        combined[kind] = cv.as_dict()

        if kind == "forest":
            importance = gini_importance(model)
            order = np.argsort(importance)[::-1]
            with open(out / "importance_forest.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["feature", "mean_decrease_gini"])
                for j in order:
                    w.writerow([names[j], repr(float(importance[j]))])

    report = _report_envelope(
        "train",
        {"attributes": args.attributes, "level": level, "folds": args.folds,
         "models": kinds},
        args.seed,
    )
    report["results"] = combined
    _write_report(out / "train_report.json", report)
    return 0


# ---------------------------------------------------------------------------
# simulate / compare
# ---------------------------------------------------------------------------


def _write_ledger_csv(path: Path, result) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["job_id", "task_index", "final_status", "attempts", "reschedules",
                    "held", "starved", "arrival", "first_dispatch", "end_time",
                    "executed_us"])
        for (job_id, task_index), e in sorted(result.ledger.items()):
            w.writerow([job_id, task_index, e["final_status"], e["attempts"],
                        e["reschedules"], e["held"], int(e["starved"]), e["arrival"],
                        e["first_dispatch"], e["end_time"], e["executed_us"]])


def cmd_simulate(args) -> int:
    if args.workload in BUILTIN_SHAPES:
        workload = build_workload(args.workload, seed=args.seed)
    else:
        workload = load_workload(args.workload)

    if args.policy == "baseline":
        policy = Baseline()
    else:
        model = load_model(args.model) if args.model else None
        policy = Predictive(model=model, retrain_interval=args.retrain_interval)

    machines = default_machines(args.machines, args.capacity)
    result = run_simulation(workload, machines, policy, seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = {"workload": args.workload, "policy": args.policy, "model": args.model,
              "machines": args.machines, "capacity": args.capacity,
              "retrain_interval": args.retrain_interval}
    report = _report_envelope("simulate", config, args.seed)
    report["result"] = result.as_dict()
    _write_report(out / "result.json", report)
    _write_ledger_csv(out / "ledger.csv", result)
    return 0


class _LedgerView:
    """Make a simulate report JSON usable by compare_results."""

    def __init__(self, path: Path):
        with open(path) as fh:
            data = json.load(fh)["result"]
        self.task_counts = data["task_counts"]
        self.job_counts = data["job_counts"]
        self.total_execution_time = data["total_execution_time"]
        self.ledger = {
            tuple(int(x) for x in key.split(":")): entry
            for key, entry in data["ledger"].items()
        }


def cmd_compare(args) -> int:
    baseline = _LedgerView(Path(args.baseline))
    predictive = _LedgerView(Path(args.predictive))
    improvement = compare_results(baseline, predictive)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = {"baseline": args.baseline, "predictive": args.predictive}
    report = _report_envelope("compare", config, args.seed)
    report["improvement"] = improvement.as_dict()
    _write_report(out / "improvement.json", report)
    return 0


# ---------------------------------------------------------------------------
# gen-trace
# ---------------------------------------------------------------------------


def cmd_gen_trace(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["seed"] = args.seed
    config = SyntheticConfig.from_dict(data)
    trace = generate_synthetic_trace(config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_task_events(trace.task_events, out / "task_events.csv")
    write_job_events(trace.job_events, out / "job_events.csv")
    write_usage_records(trace.usage_records, out / "task_usage.csv")
    _write_report(out / "manifest.json", trace_manifest(config, trace))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schedtrace",
        description="Cluster trace analysis, failure prediction, and "
                    "predictive-rescheduling simulation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="status distributions and attribute tables")
    p.add_argument("input", help="directory with task_events*/job_events*/task_usage* CSVs")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-fraction", type=float, default=1.0,
                   help="random fraction of task event files to analyze")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="cross-validate and fit outcome predictors")
    p.add_argument("--attributes", required=True, help="attribute CSV from analyze")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", choices=["all", "forest", "tree", "glm"], default="all")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1, help="parallel tree-training workers")
    p.add_argument("--config", help="JSON file with per-model parameter overrides")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("simulate", help="run one scheduling policy over a workload")
    p.add_argument("--workload", required=True,
                   help="built-in name (single|batch|mix) or workload JSON path")
    p.add_argument("--policy", choices=["baseline", "predictive"], default="baseline")
    p.add_argument("--model", help="serialized model JSON for the predictive policy")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--machines", type=int, default=8)
    p.add_argument("--capacity", type=float, default=1.0)
    p.add_argument("--retrain-interval", type=int, default=600_000_000,
                   help="simulated microseconds between model retrainings")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="baseline-vs-predictive improvement report")
    p.add_argument("--baseline", required=True, help="result.json of the baseline run")
    p.add_argument("--predictive", required=True, help="result.json of the predictive run")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-trace", help="generate a synthetic trace")
    p.add_argument("--config", required=True, help="SyntheticConfig JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_gen_trace)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
