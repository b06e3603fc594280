"""Streaming readers/writers for cluster trace CSV files.

Column order follows the public clusterdata-2011 layout (no header row,
optionally gzip-compressed). Parsers are lazy generators: they hold one
row at a time, so memory use is independent of file length. The anonymized
user and constraint fields are accepted but not retained.
"""

from __future__ import annotations

import csv
import gzip
import io
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from .lifecycle import EventType

Source = Union[str, Path, IO, Iterable[str]]

# task_events columns:
#   0 timestamp, 1 missing_info, 2 job_id, 3 task_index, 4 machine_id,
#   5 event_type, 6 user, 7 scheduling_class, 8 priority,
#   9 cpu_request, 10 ram_request, 11 disk_request, 12 different_machines
TASK_EVENT_COLUMNS = 13

# job_events columns:
#   0 timestamp, 1 missing_info, 2 job_id, 3 event_type, 4 user,
#   5 scheduling_class, 6 job_name, 7 logical_job_name
JOB_EVENT_COLUMNS = 8

# task_usage columns (19): we consume
#   0 start_time, 1 end_time, 2 job_id, 3 task_index,
#   5 cpu_rate, 6 canonical_memory_usage, 12 local_disk_space_usage
USAGE_COLUMNS = 19


class MalformedRow(ValueError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class InvalidFraction(ValueError):
    pass


@dataclass(frozen=True)
class TaskEvent:
    timestamp: int
    job_id: int
    task_index: int
    machine_id: Optional[int]
    event: EventType
    scheduling_class: int
    priority: int
    cpu_request: Optional[float]
    ram_request: Optional[float]
    disk_request: Optional[float]
    missing_info: Optional[int] = None


@dataclass(frozen=True)
class JobEvent:
    timestamp: int
    job_id: int
    event: EventType
    scheduling_class: int
    missing_info: Optional[int] = None


@dataclass(frozen=True)
class UsageRecord:
    job_id: int
    task_index: int
    cpu_used: float
    ram_used: float
    disk_used: float
    window_start: int
    window_end: int


def _open_lines(source: Source):
    """Yield (line iterator, closer) for a path, file object, or iterable."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.suffix == ".gz":
            fh = gzip.open(path, "rt", newline="")
        else:
            fh = open(path, "rt", newline="")
        return fh, fh.close
    if hasattr(source, "read"):
        if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(
            source, "mode", ""
        ):
            return io.TextIOWrapper(source, newline=""), None
        return source, None
    return iter(source), None


def _int_field(row: Sequence[str], idx: int, line_no: int, name: str) -> int:
    try:
        return int(row[idx])
    except ValueError:
        raise MalformedRow(line_no, f"non-numeric {name}: {row[idx]!r}") from None


def _opt_int(row: Sequence[str], idx: int, line_no: int, name: str) -> Optional[int]:
    text = row[idx]
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        raise MalformedRow(line_no, f"non-numeric {name}: {text!r}") from None


def _opt_float(row: Sequence[str], idx: int, line_no: int, name: str) -> Optional[float]:
    text = row[idx]
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise MalformedRow(line_no, f"non-numeric {name}: {text!r}") from None


def _event_type(row: Sequence[str], idx: int, line_no: int) -> EventType:
    code = _int_field(row, idx, line_no, "event code")
    try:
        return EventType(code)
    except ValueError:
        raise MalformedRow(line_no, f"unknown event code {code}") from None


def parse_task_events(source: Source) -> Iterator[TaskEvent]:
    """Lazily parse task event rows in file order."""
    lines, close = _open_lines(source)
    try:
        for line_no, row in enumerate(csv.reader(lines), start=1):
            if len(row) != TASK_EVENT_COLUMNS:
                raise MalformedRow(line_no, f"arity {len(row)} != {TASK_EVENT_COLUMNS}")
            yield TaskEvent(
                timestamp=_int_field(row, 0, line_no, "timestamp"),
                missing_info=_opt_int(row, 1, line_no, "missing_info"),
                job_id=_int_field(row, 2, line_no, "job_id"),
                task_index=_int_field(row, 3, line_no, "task_index"),
                machine_id=_opt_int(row, 4, line_no, "machine_id"),
                event=_event_type(row, 5, line_no),
                scheduling_class=_int_field(row, 7, line_no, "scheduling_class"),
                priority=_int_field(row, 8, line_no, "priority"),
                cpu_request=_opt_float(row, 9, line_no, "cpu_request"),
                ram_request=_opt_float(row, 10, line_no, "ram_request"),
                disk_request=_opt_float(row, 11, line_no, "disk_request"),
            )
    finally:
        if close is not None:
            close()


def parse_job_events(source: Source) -> Iterator[JobEvent]:
    """Lazily parse job event rows in file order."""
    lines, close = _open_lines(source)
    try:
        for line_no, row in enumerate(csv.reader(lines), start=1):
            if len(row) != JOB_EVENT_COLUMNS:
                raise MalformedRow(line_no, f"arity {len(row)} != {JOB_EVENT_COLUMNS}")
            yield JobEvent(
                timestamp=_int_field(row, 0, line_no, "timestamp"),
                missing_info=_opt_int(row, 1, line_no, "missing_info"),
                job_id=_int_field(row, 2, line_no, "job_id"),
                event=_event_type(row, 3, line_no),
                scheduling_class=_int_field(row, 5, line_no, "scheduling_class"),
            )
    finally:
        if close is not None:
            close()


def parse_usage_records(source: Source) -> Iterator[UsageRecord]:
    """Lazily parse task usage rows (resource consumption windows)."""
    lines, close = _open_lines(source)
    try:
        for line_no, row in enumerate(csv.reader(lines), start=1):
            if len(row) != USAGE_COLUMNS:
                raise MalformedRow(line_no, f"arity {len(row)} != {USAGE_COLUMNS}")
            start = _int_field(row, 0, line_no, "window_start")
            end = _int_field(row, 1, line_no, "window_end")
            if start >= end:
                raise MalformedRow(line_no, f"window [{start}, {end}) is empty")
            yield UsageRecord(
                job_id=_int_field(row, 2, line_no, "job_id"),
                task_index=_int_field(row, 3, line_no, "task_index"),
                cpu_used=_opt_float(row, 5, line_no, "cpu_used") or 0.0,
                ram_used=_opt_float(row, 6, line_no, "ram_used") or 0.0,
                disk_used=_opt_float(row, 12, line_no, "disk_used") or 0.0,
                window_start=start,
                window_end=end,
            )
    finally:
        if close is not None:
            close()


def sample_files(paths: Sequence, fraction: float, seed: int) -> list:
    """Deterministic random subset of ceil(fraction * N) paths, order-stable."""
    if not 0.0 < fraction <= 1.0:
        raise InvalidFraction(f"fraction {fraction} outside (0, 1]")
    if not paths:
        raise InvalidFraction("empty path list")
    n = len(paths)
    k = math.ceil(fraction * n)
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(n), k))
    return [paths[i] for i in chosen]


# ---------------------------------------------------------------------------
# Writers (inverse of the parsers; used by the synthetic generator and tests)
# ---------------------------------------------------------------------------


def _fmt_opt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open_out(path: Union[str, Path]):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "wt", newline="")
    return open(path, "wt", newline="")


def write_task_events(events: Iterable[TaskEvent], path: Union[str, Path]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh)
        for e in events:
            w.writerow(
                [
                    e.timestamp,
                    _fmt_opt(e.missing_info),
                    e.job_id,
                    e.task_index,
                    _fmt_opt(e.machine_id),
                    int(e.event),
                    "",  # user (anonymized)
                    e.scheduling_class,
                    e.priority,
                    _fmt_opt(e.cpu_request),
                    _fmt_opt(e.ram_request),
                    _fmt_opt(e.disk_request),
                    "",  # different-machines constraint
                ]
            )


def write_job_events(events: Iterable[JobEvent], path: Union[str, Path]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh)
        for e in events:
            w.writerow(
                [
                    e.timestamp,
                    _fmt_opt(e.missing_info),
                    e.job_id,
                    int(e.event),
                    "",  # user
                    e.scheduling_class,
                    "",  # job name
                    "",  # logical job name
                ]
            )


def write_usage_records(records: Iterable[UsageRecord], path: Union[str, Path]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh)
        for r in records:
            row = [""] * USAGE_COLUMNS
            row[0] = str(r.window_start)
            row[1] = str(r.window_end)
            row[2] = str(r.job_id)
            row[3] = str(r.task_index)
            row[5] = repr(r.cpu_used)
            row[6] = repr(r.ram_used)
            row[12] = repr(r.disk_used)
            w.writerow(row)
