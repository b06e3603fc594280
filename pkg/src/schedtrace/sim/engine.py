"""Deterministic discrete-event cluster simulator.

One event loop serves both policies. Baseline dispatches queued tasks
greedily (highest priority first, FIFO within a priority, first machine
with room). Predictive consults a failure model before each dispatch and
re-enqueues predicted-fail tasks without executing them, re-evaluating at
every later dequeue; the model retrains periodically on the attempts
completed so far. A re-enqueue cap keeps the loop total: a task held that
many times dispatches unconditionally and is flagged starved.

Attempt outcomes come from the workload's scripted per-attempt draws plus
the live earlier-sibling condition (see workload.py). The predictor only
ever sees the task's live attribute snapshot.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .._kernels import splitmix64
from ..lifecycle import FinalStatus
from ..models import predict_model, train_forest
from .compare import job_rollup
from .workload import SimTask, Workload

#: Live attribute names the in-simulation model trains on. Models loaded
#: from files may use any subset of the task-attribute field names; their
#: inputs are assembled by name from the same live snapshot.
SIM_FEATURE_NAMES = [
    "scheduling_class",
    "priority",
    "requested_cpu",
    "requested_ram",
    "requested_disk",
    "prev_finished",
    "prev_killed",
    "prev_failed",
    "prev_evicted",
    "reschedule_count",
    "waiting_time",
]

_EPS = 1e-9


class ResourceAccountingError(AssertionError):
    pass


class NoFeasibleMachine(ValueError):
    def __init__(self, task: SimTask):
        self.task = task
        super().__init__(
            f"task {task.job_id}:{task.task_index} requests exceed every machine"
        )


@dataclass
class Machine:
    id: int
    cpu_capacity: float = 1.0
    ram_capacity: float = 1.0
    disk_capacity: float = 1.0
    cpu_alloc: float = 0.0
    ram_alloc: float = 0.0
    disk_alloc: float = 0.0

    def fits(self, task: SimTask) -> bool:
        return (
            self.cpu_alloc + task.cpu_request <= self.cpu_capacity + _EPS
            and self.ram_alloc + task.ram_request <= self.ram_capacity + _EPS
            and self.disk_alloc + task.disk_request <= self.disk_capacity + _EPS
        )

    def allocate(self, task: SimTask) -> None:
        self.cpu_alloc += task.cpu_request
        self.ram_alloc += task.ram_request
        self.disk_alloc += task.disk_request
        if (
            self.cpu_alloc > self.cpu_capacity + _EPS
            or self.ram_alloc > self.ram_capacity + _EPS
            or self.disk_alloc > self.disk_capacity + _EPS
        ):
            raise ResourceAccountingError(f"machine {self.id} over capacity")

    def release(self, task: SimTask) -> None:
        self.cpu_alloc -= task.cpu_request
        self.ram_alloc -= task.ram_request
        self.disk_alloc -= task.disk_request
        if min(self.cpu_alloc, self.ram_alloc, self.disk_alloc) < -_EPS:
            raise ResourceAccountingError(f"machine {self.id} released below zero")
        self.cpu_alloc = max(0.0, self.cpu_alloc)
        self.ram_alloc = max(0.0, self.ram_alloc)
        self.disk_alloc = max(0.0, self.disk_alloc)


def default_machines(n: int = 8, capacity: float = 1.0) -> List[Machine]:
    return [Machine(id=i, cpu_capacity=capacity, ram_capacity=capacity,
                    disk_capacity=capacity) for i in range(n)]


@dataclass(frozen=True)
class Baseline:
    name: str = "baseline"


@dataclass(frozen=True)
class Predictive:
    model: object = None  # initial model; None = warm up as baseline
    retrain_interval: int = 600_000_000  # 10 simulated minutes
    n_trees: int = 20
    max_depth: int = 8
    min_leaf: int = 5
    reenqueue_cap: int = 50
    min_training_rows: int = 30
    name: str = "predictive"


@dataclass
class _TaskState:
    task: SimTask
    status: str = "unsubmitted"  # waiting|delayed|running|terminal names
    attempts: int = 0
    reschedule_count: int = 0
    re_enqueues: int = 0  # prediction-driven holds
    starved: bool = False
    force_dispatch: bool = False
    failed_mark: bool = False  # counts as "currently failed" for siblings
    evicted_mark: bool = False
    first_dispatch: Optional[int] = None
    last_dispatch: Optional[int] = None
    end_time: Optional[int] = None
    machine: Optional[int] = None
    outcome: Optional[str] = None  # outcome of the running attempt
    dispatch_row: Optional[List[float]] = None  # features seen at dispatch
    executed_us: int = 0
    held: bool = False  # last model verdict was "fail"
    eval_job_version: int = -1
    eval_model_version: int = -1

    @property
    def final_status(self) -> Optional[FinalStatus]:
        return {
            "finished": FinalStatus.FINISHED,
            "failed": FinalStatus.FAILED,
            "killed": FinalStatus.KILLED,
            "evicted": FinalStatus.EVICTED,
            "unscheduled": FinalStatus.UNSCHEDULED,
        }.get(self.status)


@dataclass
class SimResult:
    policy: str
    workload_kind: str
    seed: int
    task_counts: Dict[str, int]
    job_counts: Dict[str, int]
    starved: int
    total_execution_time: int
    retrains: int
    infeasible: List[Tuple[int, int]]
    ledger: Dict[Tuple[int, int], dict]
    machine_peaks: List[dict]

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "workload": self.workload_kind,
            "seed": self.seed,
            "task_counts": dict(self.task_counts),
            "job_counts": dict(self.job_counts),
            "starved": self.starved,
            "total_execution_time": self.total_execution_time,
            "retrains": self.retrains,
            "infeasible": [f"{j}:{i}" for j, i in self.infeasible],
            "ledger": {f"{j}:{i}": entry for (j, i), entry in sorted(self.ledger.items())},
            "machine_peaks": self.machine_peaks,
        }


_ARRIVE, _RESUBMIT, _COMPLETE, _RETRAIN = 0, 1, 2, 3


class _Sim:
    def __init__(self, workload: Workload, machines: List[Machine], policy, seed: int):
        self.workload = workload
        self.machines = machines
        self.policy = policy
        self.seed = seed
        self.predictive = isinstance(policy, Predictive)
        self.model = policy.model if self.predictive else None
        self.states = {t.key: _TaskState(task=t) for t in workload.tasks}
        self.by_job: Dict[int, List[_TaskState]] = {}
        for t in workload.tasks:
            self.by_job.setdefault(t.job_id, []).append(self.states[t.key])
        for siblings in self.by_job.values():
            siblings.sort(key=lambda s: s.task.task_index)
        self.queue: List[_TaskState] = []
        self.heap: list = []
        self.seq = 0
        self.now = 0
        self.n_terminal = 0
        self.last_transition = 0
        self.train_X: List[List[float]] = []
        self.train_y: List[int] = []
        self.retrain_count = 0
        self.rng_state = seed
        self.infeasible: List[Tuple[int, int]] = []
        # Version counters gate hold re-evaluation: a held task is only
        # re-judged (and its re-enqueue counted) once its job's sibling
        # state or the model has changed since the last verdict.
        self.job_version: Dict[int, int] = {j: 0 for j in self.by_job}
        self.model_version = 0
        self.peaks = [
            {"cpu": 0.0, "ram": 0.0, "disk": 0.0} for _ in machines
        ]

    def push(self, time: int, kind: int, key=None):
        heapq.heappush(self.heap, (time, self.seq, kind, key))
        self.seq += 1

    # -- live attributes ---------------------------------------------------

    def live_attributes(self, st: _TaskState) -> Dict[str, float]:
        prev = {"finished": 0, "killed": 0, "failed": 0, "evicted": 0}
        for sib in self.by_job[st.task.job_id]:
            if sib.task.task_index >= st.task.task_index:
                break
            if sib.status == "finished":
                prev["finished"] += 1
            elif sib.status == "killed":
                prev["killed"] += 1
            elif sib.failed_mark:
                prev["failed"] += 1
            elif sib.evicted_mark or sib.status == "evicted":
                prev["evicted"] += 1
        t = st.task
        return {
            "scheduling_class": t.scheduling_class,
            "priority": t.priority,
            "requested_cpu": t.cpu_request,
            "requested_ram": t.ram_request,
            "requested_disk": t.disk_request,
            "used_cpu": 0.0,
            "used_ram": 0.0,
            "used_disk": 0.0,
            "prev_finished": prev["finished"],
            "prev_killed": prev["killed"],
            "prev_failed": prev["failed"],
            "prev_evicted": prev["evicted"],
            "prev_lost": 0.0,
            "prev_unscheduled": 0.0,
            "reschedule_count": st.reschedule_count,
            "waiting_time": max(0, self.now - st.task.arrival),
        }

    def _sibling_trouble(self, st: _TaskState) -> bool:
        """True while any earlier sibling is currently failed or killed."""
        for sib in self.by_job[st.task.job_id]:
            if sib.task.task_index >= st.task.task_index:
                return False
            if sib.failed_mark or sib.status == "killed":
                return True
        return False

    # -- event handlers ----------------------------------------------------

    def on_arrive(self, st: _TaskState):
        t = st.task
        feasible = any(
            t.cpu_request <= m.cpu_capacity + _EPS
            and t.ram_request <= m.ram_capacity + _EPS
            and t.disk_request <= m.disk_capacity + _EPS
            for m in self.machines
        )
        if not feasible:
            self.infeasible.append(t.key)
            self._finalize(st, "unscheduled")
            return
        st.status = "waiting"
        self.queue.append(st)

    def on_resubmit(self, st: _TaskState):
        st.status = "waiting"
        self.queue.append(st)

    def on_complete(self, st: _TaskState):
        machine = self.machines[st.machine]
        machine.release(st.task)
        st.machine = None
        outcome = st.outcome
        st.outcome = None
        # One training row per completed attempt: the features the model
        # would have seen at dispatch, labelled by what actually happened.
        self.train_X.append(st.dispatch_row)
        self.train_y.append(0 if outcome == "finish" else 1)
        st.dispatch_row = None

        if outcome == "finish":
            self._finalize(st, "finished")
        elif outcome == "kill":
            self._finalize(st, "killed")
        elif outcome == "fail":
            st.failed_mark = True
            if st.attempts >= st.task.plan.max_attempts:
                self._finalize(st, "failed")
            else:
                self._retry(st)
        elif outcome == "evict":
            st.evicted_mark = True
            if st.attempts >= st.task.plan.max_attempts:
                self._finalize(st, "evicted")
            else:
                self._retry(st)
        else:  # pragma: no cover - outcome set at dispatch
            raise RuntimeError(f"unknown outcome {outcome!r}")
        self.job_version[st.task.job_id] += 1

    def _retry(self, st: _TaskState):
        st.status = "delayed"
        st.reschedule_count += 1
        self.push(self.now + st.task.retry_delay, _RESUBMIT, st.task.key)

    def _finalize(self, st: _TaskState, status: str):
        st.status = status
        st.end_time = self.now
        self.n_terminal += 1
        self.last_transition = self.now

    def on_retrain(self):
        self.retrain_count += 1
        self.model_version += 1
        if self.n_terminal >= len(self.states):
            return
        rows = len(self.train_y)
        if rows >= self.policy.min_training_rows and 0 < sum(self.train_y) < rows:
            self.rng_state, model_seed = splitmix64(self.rng_state)
            self.model = train_forest(
                np.asarray(self.train_X, dtype=np.float64),
                np.asarray(self.train_y, dtype=np.int8),
                n_trees=self.policy.n_trees,
                max_depth=self.policy.max_depth,
                min_leaf=self.policy.min_leaf,
                seed=model_seed,
                feature_names=SIM_FEATURE_NAMES,
            )
        self.push(self.now + self.policy.retrain_interval, _RETRAIN)

    # -- dispatching ---------------------------------------------------------

    def sweep(self):
        if not self.queue:
            return
        order = sorted(
            self.queue,
            key=lambda s: (-s.task.priority, s.task.arrival, s.task.job_id,
                           s.task.task_index),
        )
        self._evaluate_holds(order)
        remaining: List[_TaskState] = []
        for st in order:
            if st.held:
                remaining.append(st)
                continue
            machine = next((m for m in self.machines if m.fits(st.task)), None)
            if machine is None:
                remaining.append(st)
                continue
            self._dispatch(st, machine)
        self.queue = remaining

    def _evaluate_holds(self, order: List[_TaskState]) -> None:
        """Refresh model verdicts (snapshot at sweep start).

        A task is (re)judged only when its job's sibling state or the model
        changed since its last verdict; each fail verdict counts as one
        re-enqueue. Tasks past the re-enqueue cap dispatch unconditionally
        and are never judged again.
        """
        if not (self.predictive and self.model is not None):
            return
        eligible = []
        for st in order:
            if st.force_dispatch:
                st.held = False
                continue
            if (
                st.eval_model_version == self.model_version
                and st.eval_job_version == self.job_version[st.task.job_id]
            ):
                continue  # nothing changed; previous verdict stands
            eligible.append(st)
        if not eligible:
            return
        names = self.model.feature_names or SIM_FEATURE_NAMES
        rows = np.empty((len(eligible), len(names)), dtype=np.float64)
        for i, st in enumerate(eligible):
            attrs = self.live_attributes(st)
            for j, name in enumerate(names):
                rows[i, j] = attrs[name]
        labels = predict_model(self.model, rows)
        for st, lab in zip(eligible, labels):
            st.eval_model_version = self.model_version
            st.eval_job_version = self.job_version[st.task.job_id]
            st.held = bool(lab)
            if st.held:
                st.re_enqueues += 1
                st.reschedule_count += 1
                if st.re_enqueues >= self.policy.reenqueue_cap:
                    st.starved = True
                    st.force_dispatch = True
                    st.held = False

    def _dispatch(self, st: _TaskState, machine: Machine):
        t = st.task
        attrs = self.live_attributes(st)
        st.dispatch_row = [attrs[name] for name in SIM_FEATURE_NAMES]

        attempt = st.attempts
        st.attempts += 1
        if st.failed_mark or st.evicted_mark:
            st.failed_mark = False
            st.evicted_mark = False
            self.job_version[t.job_id] += 1
        if st.first_dispatch is None:
            st.first_dispatch = self.now
        st.last_dispatch = self.now
        st.status = "running"
        st.machine = machine.id
        machine.allocate(t)
        peak = self.peaks[machine.id]
        peak["cpu"] = max(peak["cpu"], machine.cpu_alloc)
        peak["ram"] = max(peak["ram"], machine.ram_alloc)
        peak["disk"] = max(peak["disk"], machine.disk_alloc)

        plan = t.plan
        if plan.kill_at is not None and plan.kill_at == attempt:
            outcome = "kill"
        elif plan.evict[attempt]:
            outcome = "evict"
        else:
            p = self.workload.base_fail_prob
            if self._sibling_trouble(st):
                p = min(1.0, p + self.workload.history_fail_boost)
            outcome = "fail" if plan.fail_u[attempt] < p else "finish"

        if outcome == "finish":
            duration = t.service_time
        else:
            duration = max(1, int(plan.fraction[attempt] * t.service_time))
        st.outcome = outcome
        st.executed_us += duration
        self.push(self.now + duration, _COMPLETE, t.key)

    # -- main loop -----------------------------------------------------------

    def run(self) -> SimResult:
        for t in self.workload.tasks:
            self.push(t.arrival, _ARRIVE, t.key)
        if self.predictive:
            self.push(self.policy.retrain_interval, _RETRAIN)

        n_tasks = len(self.states)
        while self.heap and self.n_terminal < n_tasks:
            time, _, kind, key = heapq.heappop(self.heap)
            if time < self.now:
                raise RuntimeError("simulated clock went backwards")
            self.now = time
            if kind == _ARRIVE:
                self.on_arrive(self.states[key])
            elif kind == _RESUBMIT:
                self.on_resubmit(self.states[key])
            elif kind == _COMPLETE:
                self.on_complete(self.states[key])
            elif kind == _RETRAIN:
                self.on_retrain()
            self.sweep()
        if self.n_terminal < n_tasks:
            raise RuntimeError("event loop drained before every task finished")
        return self._result()

    def _result(self) -> SimResult:
        counts = {s.value: 0 for s in FinalStatus}
        ledger = {}
        for key, st in self.states.items():
            status = st.final_status
            counts[status.value] += 1
            ledger[key] = {
                "final_status": status.value,
                "attempts": st.attempts,
                "reschedules": st.reschedule_count,
                "held": st.re_enqueues,
                "starved": st.starved,
                "arrival": st.task.arrival,
                "first_dispatch": st.first_dispatch,
                "end_time": st.end_time,
                "executed_us": st.executed_us,
            }
        counts.pop("lost")  # simulation outcomes are always observed
        job_statuses = job_rollup(
            {key: st.final_status for key, st in self.states.items()}
        )
        job_counts = {s.value: 0 for s in FinalStatus}
        for status in job_statuses.values():
            job_counts[status.value] += 1
        job_counts.pop("lost")
        return SimResult(
            policy=self.policy.name,
            workload_kind=self.workload.kind,
            seed=self.seed,
            task_counts=counts,
            job_counts=job_counts,
            starved=sum(1 for st in self.states.values() if st.starved),
            total_execution_time=self.last_transition,
            retrains=self.retrain_count,
            infeasible=self.infeasible,
            ledger=ledger,
            machine_peaks=self.peaks,
        )


def run_simulation(
    workload: Workload,
    machines: Optional[List[Machine]] = None,
    policy=None,
    seed: int = 0,
) -> SimResult:
    """Run one policy over a workload; deterministic in (workload, seed)."""
    if not workload.tasks:
        raise ValueError("workload has no tasks")
    if machines is None:
        machines = default_machines()
    if not machines:
        raise ValueError("need at least one machine")
    if policy is None:
        policy = Baseline()
    return _Sim(workload, machines, policy, seed).run()
