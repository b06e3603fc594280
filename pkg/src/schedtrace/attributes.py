"""Per-task and per-job attribute records reconstructed from event streams.

A task's record captures its scheduling delay (waiting time), execution
span (service time), resource requests and observed usage, how many of the
tasks submitted before it in the same job ended in each final status, how
often it was rescheduled, and its own final status. Job records aggregate
task outcomes. "Earlier tasks in the same job" is the dependency notion
used throughout: the trace format omits explicit dependency edges, so
submission order stands in for them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .ingest import JobEvent, TaskEvent, UsageRecord
from .lifecycle import (
    EventType,
    FinalStatus,
    TERMINAL_EVENTS,
    classify_final_status,
    count_resubmissions,
)

TaskKey = Tuple[int, int]


class MissingSubmit(ValueError):
    pass


@dataclass
class TaskAttributes:
    job_id: int
    task_index: int
    waiting_time: int
    service_time: int
    scheduling_class: int
    priority: int
    requested_cpu: float
    requested_ram: float
    requested_disk: float
    used_cpu: float
    used_ram: float
    used_disk: float
    prev_finished: int
    prev_killed: int
    prev_failed: int
    prev_evicted: int
    prev_lost: int
    prev_unscheduled: int
    reschedule_count: int
    final_status: FinalStatus


@dataclass
class JobAttributes:
    job_id: int
    waiting_time: int
    service_time: int
    scheduling_class: int
    n_finished: int
    n_killed: int
    n_failed: int
    n_evicted: int
    n_lost: int
    n_unscheduled: int
    total_tasks: int
    final_status: FinalStatus


_PREV_FIELD = {
    FinalStatus.FINISHED: "prev_finished",
    FinalStatus.KILLED: "prev_killed",
    FinalStatus.FAILED: "prev_failed",
    FinalStatus.EVICTED: "prev_evicted",
    FinalStatus.LOST: "prev_lost",
    FinalStatus.UNSCHEDULED: "prev_unscheduled",
}

_JOB_FIELD = {
    FinalStatus.FINISHED: "n_finished",
    FinalStatus.KILLED: "n_killed",
    FinalStatus.FAILED: "n_failed",
    FinalStatus.EVICTED: "n_evicted",
    FinalStatus.LOST: "n_lost",
    FinalStatus.UNSCHEDULED: "n_unscheduled",
}


def _waiting_service(events: Sequence) -> Tuple[int, int]:
    """(waiting, service) from a time-ordered event record sequence."""
    first_submit = next((e.timestamp for e in events if e.event is EventType.SUBMIT), None)
    if first_submit is None:
        raise MissingSubmit("event sequence has no Submit")
    schedules = [e.timestamp for e in events if e.event is EventType.SCHEDULE]
    last_ts = events[-1].timestamp
    if not schedules:
        return last_ts - first_submit, 0
    waiting = schedules[0] - first_submit
    # Service runs from the last placement to the terminal event; for a
    # record truncated mid-run it covers the observed span.
    last_schedule = schedules[-1]
    terminal = next(
        (e.timestamp for e in reversed(events) if e.event in TERMINAL_EVENTS), last_ts
    )
    return waiting, max(0, terminal - last_schedule)


def build_task_attributes(
    events: Sequence[TaskEvent],
    usage: Sequence[UsageRecord] = (),
    prior_statuses: Sequence[FinalStatus] = (),
) -> TaskAttributes:
    """Build one task's record from its time-ordered events.

    prior_statuses are the final statuses of tasks submitted earlier in
    the same job, in any order.
    """
    if not events:
        raise MissingSubmit("empty event sequence")
    waiting, service = _waiting_service(events)
    first = events[0]
    requested = {"cpu": 0.0, "ram": 0.0, "disk": 0.0}
    for e in events:
        if e.cpu_request is not None:
            requested = {
                "cpu": e.cpu_request,
                "ram": e.ram_request or 0.0,
                "disk": e.disk_request or 0.0,
            }
            break
    if usage:
        used_cpu = sum(u.cpu_used for u in usage) / len(usage)
        used_ram = sum(u.ram_used for u in usage) / len(usage)
        used_disk = sum(u.disk_used for u in usage) / len(usage)
    else:
        used_cpu = used_ram = used_disk = 0.0

    attrs = TaskAttributes(
        job_id=first.job_id,
        task_index=first.task_index,
        waiting_time=waiting,
        service_time=service,
        scheduling_class=first.scheduling_class,
        priority=first.priority,
        requested_cpu=requested["cpu"],
        requested_ram=requested["ram"],
        requested_disk=requested["disk"],
        used_cpu=used_cpu,
        used_ram=used_ram,
        used_disk=used_disk,
        prev_finished=0,
        prev_killed=0,
        prev_failed=0,
        prev_evicted=0,
        prev_lost=0,
        prev_unscheduled=0,
        reschedule_count=count_resubmissions(e.event for e in events),
        final_status=classify_final_status([e.event for e in events]),
    )
    for status in prior_statuses:
        name = _PREV_FIELD[status]
        setattr(attrs, name, getattr(attrs, name) + 1)
    return attrs


def build_job_attributes(
    task_attrs: Sequence[TaskAttributes],
    job_events: Sequence[JobEvent] = (),
) -> JobAttributes:
    """Aggregate one job's task records plus its own event sequence."""
    if job_events:
        waiting, service = _waiting_service(job_events)
        final = classify_final_status([e.event for e in job_events])
        scheduling_class = job_events[0].scheduling_class
        job_id = job_events[0].job_id
    else:
        waiting = service = 0
        final = FinalStatus.LOST
        scheduling_class = task_attrs[0].scheduling_class if task_attrs else 0
        job_id = task_attrs[0].job_id if task_attrs else 0

    attrs = JobAttributes(
        job_id=job_id,
        waiting_time=waiting,
        service_time=service,
        scheduling_class=scheduling_class,
        n_finished=0,
        n_killed=0,
        n_failed=0,
        n_evicted=0,
        n_lost=0,
        n_unscheduled=0,
        total_tasks=len(task_attrs),
        final_status=final,
    )
    for t in task_attrs:
        name = _JOB_FIELD[t.final_status]
        setattr(attrs, name, getattr(attrs, name) + 1)
    return attrs


def collect_task_attributes(
    task_events: Iterable[TaskEvent],
    usage_records: Iterable[UsageRecord] = (),
) -> List[TaskAttributes]:
    """Group a task event stream by (job, task) and build every record.

    Events arriving out of time order are sorted per task (stable, so
    equal timestamps keep file order). Dependency order within a job is
    first-submission order, ties broken by task index.
    """
    per_task: Dict[TaskKey, List[TaskEvent]] = {}
    for e in task_events:
        per_task.setdefault((e.job_id, e.task_index), []).append(e)
    for events in per_task.values():
        events.sort(key=lambda e: e.timestamp)

    per_task_usage: Dict[TaskKey, List[UsageRecord]] = {}
    for u in usage_records:
        per_task_usage.setdefault((u.job_id, u.task_index), []).append(u)

    # Order tasks within each job by first submit (fall back to first event).
    def submit_key(key: TaskKey):
        events = per_task[key]
        first_submit = next(
            (e.timestamp for e in events if e.event is EventType.SUBMIT),
            events[0].timestamp,
        )
        return first_submit, key[1]

    by_job: Dict[int, List[TaskKey]] = {}
    for key in per_task:
        by_job.setdefault(key[0], []).append(key)

    out: List[TaskAttributes] = []
    for job_id in sorted(by_job):
        keys = sorted(by_job[job_id], key=submit_key)
        prior: List[FinalStatus] = []
        for key in keys:
            attrs = build_task_attributes(
                per_task[key], per_task_usage.get(key, ()), prior
            )
            out.append(attrs)
            prior.append(attrs.final_status)
    return out


def collect_job_attributes(
    task_attrs: Iterable[TaskAttributes],
    job_events: Iterable[JobEvent] = (),
) -> List[JobAttributes]:
    """Group task records and job events by job id and build every record."""
    tasks_by_job: Dict[int, List[TaskAttributes]] = {}
    for t in task_attrs:
        tasks_by_job.setdefault(t.job_id, []).append(t)
    events_by_job: Dict[int, List[JobEvent]] = {}
    for e in job_events:
        events_by_job.setdefault(e.job_id, []).append(e)
    for evs in events_by_job.values():
        evs.sort(key=lambda e: e.timestamp)

    out = []
    for job_id in sorted(set(tasks_by_job) | set(events_by_job)):
        out.append(
            build_job_attributes(
                tasks_by_job.get(job_id, []), events_by_job.get(job_id, [])
            )
        )
    return out


# ---------------------------------------------------------------------------
# CSV round trip for attribute tables
# ---------------------------------------------------------------------------


def write_attributes_csv(records: Sequence, path: Union[str, Path]) -> None:
    """One row per record, header row naming every field."""
    if not records:
        raise ValueError("no records to write")
    names = [f.name for f in fields(records[0])]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in records:
            row = []
            for name in names:
                value = getattr(r, name)
                if isinstance(value, FinalStatus):
                    value = value.value
                elif isinstance(value, float):
                    value = repr(value)
                row.append(value)
            w.writerow(row)


def read_task_attributes_csv(path: Union[str, Path]) -> List[TaskAttributes]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {}
            for f in fields(TaskAttributes):
                raw = row[f.name]
                if f.name == "final_status":
                    kwargs[f.name] = FinalStatus(raw)
                elif f.type in ("int", int):
                    kwargs[f.name] = int(raw)
                else:
                    kwargs[f.name] = float(raw)
            out.append(TaskAttributes(**kwargs))
    return out


def read_job_attributes_csv(path: Union[str, Path]) -> List[JobAttributes]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {}
            for f in fields(JobAttributes):
                raw = row[f.name]
                if f.name == "final_status":
                    kwargs[f.name] = FinalStatus(raw)
                else:
                    kwargs[f.name] = int(raw)
            out.append(JobAttributes(**kwargs))
    return out
