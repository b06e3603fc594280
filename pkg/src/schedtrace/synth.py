"""Seeded synthetic trace generator.

Produces task/job event streams (plus usage windows) in the same schema
the parsers read. Failure structure is controllable: a task fails with
base_fail_prob, boosted by history_fail_boost once any earlier task of the
same job failed or was killed, so failures cascade through a job the way
they do in real cluster traces. Low-priority tasks with large CPU requests
are the ones that get evicted; the marginal eviction rate for a
low-priority task is low_priority_evict_prob.

Every generated per-task sequence replays cleanly through the lifecycle
table, and all randomness comes from one seeded generator, so identical
configs produce identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple, Union

import numpy as np

from .ingest import JobEvent, TaskEvent, UsageRecord
from .lifecycle import EventType, FinalStatus

# Upper bound of the uniform request distributions; the eviction cutoff is
# expressed as a quantile of the CPU request below.
_CPU_REQ_MAX = 0.5
_RAM_REQ_MAX = 0.5
_DISK_REQ_MAX = 0.2

# Failed attempts before the final outcome are capped so event sequences
# stay short even when the failure probability saturates.
_MAX_PRE_CYCLES = 3


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticConfig:
    n_jobs: int
    tasks_per_job: Union[int, Tuple[int, int]] = (1, 8)
    base_fail_prob: float = 0.05
    history_fail_boost: float = 0.9
    low_priority_evict_prob: float = 0.3
    priority_threshold: int = 2
    seed: int = 0
    # Duration model (microseconds, log-normal); parameters, not claims.
    job_gap_mean_us: float = 2_000_000.0
    wait_mu: float = 17.2
    wait_sigma: float = 1.0
    service_mu: float = 19.5
    service_sigma: float = 1.0

    def __post_init__(self):
        if self.n_jobs < 1:
            raise InvalidConfig(f"n_jobs must be >= 1, got {self.n_jobs}")
        for name in ("base_fail_prob", "history_fail_boost", "low_priority_evict_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1], got {p}")
        tpj = self.tasks_per_job
        if isinstance(tpj, int):
            if tpj < 1:
                raise InvalidConfig(f"tasks_per_job must be >= 1, got {tpj}")
        else:
            lo, hi = tpj
            if lo < 1 or hi < lo:
                raise InvalidConfig(f"bad tasks_per_job range {tpj}")

    def to_dict(self) -> dict:
        tpj = self.tasks_per_job
        return {
            "n_jobs": self.n_jobs,
            "tasks_per_job": list(tpj) if isinstance(tpj, tuple) else tpj,
            "base_fail_prob": self.base_fail_prob,
            "history_fail_boost": self.history_fail_boost,
            "low_priority_evict_prob": self.low_priority_evict_prob,
            "priority_threshold": self.priority_threshold,
            "seed": self.seed,
            "job_gap_mean_us": self.job_gap_mean_us,
            "wait_mu": self.wait_mu,
            "wait_sigma": self.wait_sigma,
            "service_mu": self.service_mu,
            "service_sigma": self.service_sigma,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticConfig":
        data = dict(data)
        tpj = data.get("tasks_per_job")
        if isinstance(tpj, list):
            data["tasks_per_job"] = tuple(tpj)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None


class SyntheticTrace(NamedTuple):
    task_events: List[TaskEvent]
    job_events: List[JobEvent]
    usage_records: List[UsageRecord]


def generate_synthetic_trace(config: SyntheticConfig) -> SyntheticTrace:
    """Generate a deterministic trace for the given config."""
    rng = np.random.default_rng(config.seed)
    evict_cutoff = _CPU_REQ_MAX * (1.0 - config.low_priority_evict_prob)

    task_events: List[TaskEvent] = []
    job_events: List[JobEvent] = []
    usage: List[UsageRecord] = []

    clock = 0.0
    for j in range(config.n_jobs):
        job_id = 10_000_000 + j
        clock += rng.exponential(config.job_gap_mean_us)
        job_submit = int(clock)
        scheduling_class = int(rng.integers(0, 4))
        tpj = config.tasks_per_job
        n_tasks = tpj if isinstance(tpj, int) else int(rng.integers(tpj[0], tpj[1] + 1))

        job_has_fail_or_kill = False
        statuses: List[FinalStatus] = []
        first_schedule = None
        last_end = job_submit

        for idx in range(n_tasks):
            priority = int(rng.integers(0, 12))
            cpu_req = float(rng.uniform(0.0, _CPU_REQ_MAX))
            ram_req = float(rng.uniform(0.0, _RAM_REQ_MAX))
            disk_req = float(rng.uniform(0.0, _DISK_REQ_MAX))
            machine = int(rng.integers(1, 101))
            # Stagger dominates jitter so submission order equals task order.
            submit = job_submit + idx * 250_000 + int(rng.uniform(0.0, 200_000.0))

            evicted = (
                config.low_priority_evict_prob > 0.0
                and priority < config.priority_threshold
                and cpu_req >= evict_cutoff
            )
            p_fail = config.base_fail_prob
            if job_has_fail_or_kill:
                p_fail = min(1.0, p_fail + config.history_fail_boost)

            if evicted:
                final_event = EventType.EVICT
                pre_cycles = 0
            else:
                fails = bool(rng.random() < p_fail)
                pre_cycles = 0
                while pre_cycles < _MAX_PRE_CYCLES and rng.random() < p_fail:
                    pre_cycles += 1
                if fails:
                    if job_has_fail_or_kill and rng.random() < 0.5:
                        final_event = EventType.KILL
                    else:
                        final_event = EventType.FAIL
                else:
                    final_event = EventType.FINISH

            service = rng.lognormal(config.service_mu, config.service_sigma)

            def emit(ts: int, event: EventType, with_machine: bool):
                task_events.append(
                    TaskEvent(
                        timestamp=ts,
                        job_id=job_id,
                        task_index=idx,
                        machine_id=machine if with_machine else None,
                        event=event,
                        scheduling_class=scheduling_class,
                        priority=priority,
                        cpu_request=cpu_req,
                        ram_request=ram_req,
                        disk_request=disk_req,
                    )
                )

            t = submit
            for cycle in range(pre_cycles + 1):
                is_last = cycle == pre_cycles
                emit(t, EventType.SUBMIT, with_machine=False)
                wait = rng.lognormal(config.wait_mu, config.wait_sigma)
                scheduled = t + max(1, int(wait))
                emit(scheduled, EventType.SCHEDULE, with_machine=True)
                if first_schedule is None:
                    first_schedule = scheduled
                event = final_event if is_last else EventType.FAIL
                if event is EventType.FINISH:
                    duration = service
                else:
                    duration = service * rng.uniform(0.05, 0.95)
                end = scheduled + max(1, int(duration))
                emit(end, event, with_machine=True)
                usage.append(
                    UsageRecord(
                        job_id=job_id,
                        task_index=idx,
                        cpu_used=cpu_req * float(rng.lognormal(0.25, 0.25)),
                        ram_used=ram_req * float(rng.lognormal(0.25, 0.25)),
                        disk_used=disk_req * float(rng.lognormal(0.25, 0.25)),
                        window_start=scheduled,
                        window_end=end,
                    )
                )
                t = end + 10_000
            last_end = max(last_end, end)

            status = {
                EventType.FINISH: FinalStatus.FINISHED,
                EventType.FAIL: FinalStatus.FAILED,
                EventType.KILL: FinalStatus.KILLED,
                EventType.EVICT: FinalStatus.EVICTED,
            }[final_event]
            statuses.append(status)
            if status in (FinalStatus.FAILED, FinalStatus.KILLED):
                job_has_fail_or_kill = True

        if all(s is FinalStatus.FINISHED for s in statuses):
            job_final = EventType.FINISH
        elif any(s is FinalStatus.FAILED for s in statuses):
            job_final = EventType.FAIL
        else:
            job_final = EventType.KILL

        job_events.append(JobEvent(job_submit, job_id, EventType.SUBMIT, scheduling_class))
        job_events.append(
            JobEvent(
                first_schedule if first_schedule is not None else job_submit + 1,
                job_id,
                EventType.SCHEDULE,
                scheduling_class,
            )
        )
        job_events.append(JobEvent(last_end + 1, job_id, job_final, scheduling_class))

    task_events.sort(key=lambda e: e.timestamp)
    job_events.sort(key=lambda e: e.timestamp)
    usage.sort(key=lambda u: u.window_start)
    return SyntheticTrace(task_events, job_events, usage)


def trace_manifest(config: SyntheticConfig, trace: SyntheticTrace) -> dict:
    """Side-manifest describing a generated trace (written next to the CSVs)."""
    return {
        "config": config.to_dict(),
        "seed": config.seed,
        "n_task_events": len(trace.task_events),
        "n_job_events": len(trace.job_events),
        "n_usage_records": len(trace.usage_records),
    }
