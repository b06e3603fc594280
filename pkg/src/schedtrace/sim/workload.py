"""Simulation workloads: tasks, arrivals, and scripted failure plans.

Ground truth is fixed per workload before any simulation runs: every task
carries per-attempt draws (fail draw, eviction flag, duration fraction, an
optional kill attempt) plus a retry budget. What an attempt actually does
at dispatch combines those draws with the live state of the task's earlier
siblings: an attempt fails when its fail draw falls below base_fail_prob,
boosted by history_fail_boost while any earlier sibling of the job sits in
a failed or killed state at that moment. Rescheduling a task to a calmer
moment therefore genuinely changes its fate, which is the effect the
predictive policy exploits; the predictor itself never sees the plan.

Built-in shapes: single (100 tasks / 100 jobs), batch (800 / 110),
mix (600 / 400).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

BUILTIN_SHAPES = {
    "single": (100, 100),  # (tasks, jobs)
    "batch": (800, 110),
    "mix": (600, 400),
}


class UnknownWorkload(ValueError):
    pass


@dataclass(frozen=True)
class FailurePlan:
    max_attempts: int
    fail_u: Tuple[float, ...]  # one uniform draw per attempt
    fraction: Tuple[float, ...]  # service fraction consumed by a bad attempt
    evict: Tuple[bool, ...]  # pre-drawn eviction flag per attempt
    kill_at: Optional[int] = None  # attempt index killed outright, if any


@dataclass(frozen=True)
class SimTask:
    job_id: int
    task_index: int
    arrival: int  # microseconds
    priority: int
    scheduling_class: int
    cpu_request: float
    ram_request: float
    disk_request: float
    service_time: int  # microseconds
    retry_delay: int  # microseconds between a bad attempt and resubmission
    plan: FailurePlan

    @property
    def key(self) -> Tuple[int, int]:
        return self.job_id, self.task_index


@dataclass
class Workload:
    kind: str
    tasks: List[SimTask]
    base_fail_prob: float
    history_fail_boost: float
    seed: int

    @property
    def n_jobs(self) -> int:
        return len({t.job_id for t in self.tasks})

    def job_tasks(self) -> Dict[int, List[SimTask]]:
        jobs: Dict[int, List[SimTask]] = {}
        for t in self.tasks:
            jobs.setdefault(t.job_id, []).append(t)
        for tasks in jobs.values():
            tasks.sort(key=lambda t: t.task_index)
        return jobs


def _job_sizes(n_tasks: int, n_jobs: int, rng: np.random.Generator) -> List[int]:
    """Partition n_tasks over n_jobs, every job nonempty, deterministic.

    Extra tasks attach preferentially to already-large jobs, giving the
    skewed job-size mix real traces show (many small jobs, a few big ones).
    """
    sizes = np.ones(n_jobs, dtype=np.int64)
    extra = n_tasks - n_jobs
    if extra < 0:
        raise ValueError(f"cannot place {n_tasks} tasks in {n_jobs} jobs")
    for _ in range(extra):
        j = int(rng.choice(n_jobs, p=sizes / sizes.sum()))
        sizes[j] += 1
    return [int(s) for s in sizes]


def build_workload(
    kind: str,
    seed: int = 0,
    *,
    base_fail_prob: float = 0.3,
    history_fail_boost: float = 0.68,
    low_priority_evict_prob: float = 0.06,
    priority_threshold: int = 2,
    kill_prob: float = 0.01,
    max_attempts: int = 3,
    job_gap_mean_us: float = 60e6,
    task_stagger_us: float = 12e6,
    service_median_us: float = 240e6,
    service_sigma: float = 0.6,
    retry_delay_median_us: float = 240e6,
) -> Workload:
    """Build one of the built-in workload shapes, deterministically in seed."""
    if kind not in BUILTIN_SHAPES:
        raise UnknownWorkload(f"unknown workload {kind!r}; have {sorted(BUILTIN_SHAPES)}")
    n_tasks, n_jobs = BUILTIN_SHAPES[kind]
    rng = np.random.default_rng(seed)
    sizes = _job_sizes(n_tasks, n_jobs, rng)

    tasks: List[SimTask] = []
    clock = 0.0
    for j, size in enumerate(sizes):
        job_id = 1000 + j
        clock += rng.exponential(job_gap_mean_us)
        scheduling_class = int(rng.integers(0, 4))
        for idx in range(size):
            arrival = int(clock + idx * task_stagger_us + rng.uniform(0, 5e6))
            priority = int(rng.integers(0, 12))
            service = int(rng.lognormal(np.log(service_median_us), service_sigma))
            low_prio = priority < priority_threshold
            evict = tuple(
                bool(low_prio and rng.random() < low_priority_evict_prob)
                for _ in range(max_attempts)
            )
            fail_u = tuple(float(rng.random()) for _ in range(max_attempts))
            fraction = tuple(float(rng.uniform(0.2, 0.8)) for _ in range(max_attempts))
            kill_at = 0 if rng.random() < kill_prob else None
            tasks.append(
                SimTask(
                    job_id=job_id,
                    task_index=idx,
                    arrival=arrival,
                    priority=priority,
                    scheduling_class=scheduling_class,
                    cpu_request=float(rng.uniform(0.05, 0.3)),
                    ram_request=float(rng.uniform(0.05, 0.3)),
                    disk_request=float(rng.uniform(0.01, 0.1)),
                    service_time=max(1, service),
                    retry_delay=max(1, int(rng.lognormal(np.log(retry_delay_median_us), 0.5))),
                    plan=FailurePlan(
                        max_attempts=max_attempts,
                        fail_u=fail_u,
                        fraction=fraction,
                        evict=evict,
                        kill_at=kill_at,
                    ),
                )
            )
    tasks.sort(key=lambda t: (t.arrival, t.job_id, t.task_index))
    return Workload(
        kind=kind,
        tasks=tasks,
        base_fail_prob=base_fail_prob,
        history_fail_boost=history_fail_boost,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------


def workload_to_dict(workload: Workload) -> dict:
    return {
        "kind": workload.kind,
        "seed": workload.seed,
        "base_fail_prob": workload.base_fail_prob,
        "history_fail_boost": workload.history_fail_boost,
        "tasks": [
            {
                "job_id": t.job_id,
                "task_index": t.task_index,
                "arrival": t.arrival,
                "priority": t.priority,
                "scheduling_class": t.scheduling_class,
                "cpu_request": t.cpu_request,
                "ram_request": t.ram_request,
                "disk_request": t.disk_request,
                "service_time": t.service_time,
                "retry_delay": t.retry_delay,
                "plan": {
                    "max_attempts": t.plan.max_attempts,
                    "fail_u": list(t.plan.fail_u),
                    "fraction": list(t.plan.fraction),
                    "evict": list(t.plan.evict),
                    "kill_at": t.plan.kill_at,
                },
            }
            for t in workload.tasks
        ],
    }


def workload_from_dict(data: dict) -> Workload:
    tasks = []
    for t in data["tasks"]:
        p = t["plan"]
        tasks.append(
            SimTask(
                job_id=t["job_id"],
                task_index=t["task_index"],
                arrival=t["arrival"],
                priority=t["priority"],
                scheduling_class=t["scheduling_class"],
                cpu_request=t["cpu_request"],
                ram_request=t["ram_request"],
                disk_request=t["disk_request"],
                service_time=t["service_time"],
                retry_delay=t["retry_delay"],
                plan=FailurePlan(
                    max_attempts=p["max_attempts"],
                    fail_u=tuple(p["fail_u"]),
                    fraction=tuple(p["fraction"]),
                    evict=tuple(bool(e) for e in p["evict"]),
                    kill_at=p["kill_at"],
                ),
            )
        )
    return Workload(
        kind=data["kind"],
        tasks=tasks,
        base_fail_prob=data["base_fail_prob"],
        history_fail_boost=data["history_fail_boost"],
        seed=data["seed"],
    )


def save_workload(workload: Workload, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(workload_to_dict(workload), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_workload(path: Union[str, Path]) -> Workload:
    with open(path) as fh:
        return workload_from_dict(json.load(fh))
