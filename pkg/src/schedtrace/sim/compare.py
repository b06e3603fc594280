"""Baseline-vs-predictive run comparison and job-level status rollup."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from ..lifecycle import FinalStatus

TaskKey = Tuple[int, int]


class LedgerMismatch(ValueError):
    pass


def job_rollup(task_statuses: Dict[TaskKey, FinalStatus]) -> Dict[int, FinalStatus]:
    """Fold per-task final statuses into one status per job.

    A job finishes only when at least one task finished and none failed or
    were killed; any failed or killed task sinks the job (all-killed jobs
    count as killed, the usual dominant cause otherwise being a failure).
    """
    by_job: Dict[int, list] = {}
    for (job_id, _), status in task_statuses.items():
        by_job.setdefault(job_id, []).append(status)

    out: Dict[int, FinalStatus] = {}
    for job_id, statuses in by_job.items():
        total = len(statuses)
        n = {s: sum(1 for x in statuses if x is s) for s in FinalStatus}
        if total == 0 or n[FinalStatus.UNSCHEDULED] == total:
            out[job_id] = FinalStatus.UNSCHEDULED
        elif n[FinalStatus.KILLED] == total:
            out[job_id] = FinalStatus.KILLED
        elif n[FinalStatus.KILLED] > 0 or n[FinalStatus.FAILED] > 0:
            out[job_id] = FinalStatus.FAILED
        elif n[FinalStatus.FINISHED] > 0:
            out[job_id] = FinalStatus.FINISHED
        elif n[FinalStatus.EVICTED] > 0:
            out[job_id] = FinalStatus.EVICTED
        else:
            out[job_id] = FinalStatus.LOST
    return out


@dataclass
class Improvement:
    flipped_to_success_pct: float  # of baseline non-finished tasks
    flipped_to_failure_pct: float  # of baseline finished tasks
    baseline_finished_tasks: int
    predictive_finished_tasks: int
    delta_finished_tasks: int
    baseline_finished_jobs: int
    predictive_finished_jobs: int
    delta_finished_jobs: int
    delta_execution_time: int  # predictive minus baseline, microseconds

    def as_dict(self) -> dict:
        return {
            "flipped_to_success_pct": self.flipped_to_success_pct,
            "flipped_to_failure_pct": self.flipped_to_failure_pct,
            "baseline_finished_tasks": self.baseline_finished_tasks,
            "predictive_finished_tasks": self.predictive_finished_tasks,
            "delta_finished_tasks": self.delta_finished_tasks,
            "baseline_finished_jobs": self.baseline_finished_jobs,
            "predictive_finished_jobs": self.predictive_finished_jobs,
            "delta_finished_jobs": self.delta_finished_jobs,
            "delta_execution_time": self.delta_execution_time,
        }


def compare_results(baseline, predictive) -> Improvement:
    """Compare two SimResults covering the identical task set."""
    base_ledger = baseline.ledger
    pred_ledger = predictive.ledger
    if set(base_ledger) != set(pred_ledger):
        raise LedgerMismatch(
            f"ledgers cover different tasks ({len(base_ledger)} vs {len(pred_ledger)})"
        )

    base_fail = [k for k, e in base_ledger.items() if e["final_status"] != "finished"]
    base_ok = [k for k, e in base_ledger.items() if e["final_status"] == "finished"]
    to_success = sum(
        1 for k in base_fail if pred_ledger[k]["final_status"] == "finished"
    )
    to_failure = sum(
        1 for k in base_ok if pred_ledger[k]["final_status"] != "finished"
    )

    return Improvement(
        flipped_to_success_pct=100.0 * to_success / len(base_fail) if base_fail else 0.0,
        flipped_to_failure_pct=100.0 * to_failure / len(base_ok) if base_ok else 0.0,
        baseline_finished_tasks=baseline.task_counts["finished"],
        predictive_finished_tasks=predictive.task_counts["finished"],
        delta_finished_tasks=(
            predictive.task_counts["finished"] - baseline.task_counts["finished"]
        ),
        baseline_finished_jobs=baseline.job_counts["finished"],
        predictive_finished_jobs=predictive.job_counts["finished"],
        delta_finished_jobs=(
            predictive.job_counts["finished"] - baseline.job_counts["finished"]
        ),
        delta_execution_time=(
            predictive.total_execution_time - baseline.total_execution_time
        ),
    )
