"""Task/job scheduling lifecycle: states, events, and final-status rules.

A task moves through four states (Unsubmitted, Pending, Running, Dead)
driven by nine scheduling event types. The transition table below is the
single source of truth for every other module; anything outside it raises
InvalidTransition so malformed traces surface loudly instead of being
silently absorbed.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence, Tuple


class LifecycleState(enum.Enum):
    UNSUBMITTED = "unsubmitted"
    PENDING = "pending"
    RUNNING = "running"
    DEAD = "dead"


class EventType(enum.IntEnum):
    """Scheduling event types, numbered with their trace-file event codes."""

    SUBMIT = 0
    SCHEDULE = 1
    EVICT = 2
    FAIL = 3
    FINISH = 4
    KILL = 5
    LOST = 6
    UPDATE_PENDING = 7
    UPDATE_RUNNING = 8


class FinalStatus(enum.Enum):
    FINISHED = "finished"
    FAILED = "failed"
    KILLED = "killed"
    EVICTED = "evicted"
    LOST = "lost"
    UNSCHEDULED = "unscheduled"


#: Event types that terminate an execution (task leaves Pending/Running).
TERMINAL_EVENTS = frozenset(
    {EventType.EVICT, EventType.FAIL, EventType.FINISH, EventType.KILL, EventType.LOST}
)

#: Final status implied by each terminal event type.
STATUS_FOR_TERMINAL = {
    EventType.FINISH: FinalStatus.FINISHED,
    EventType.FAIL: FinalStatus.FAILED,
    EventType.KILL: FinalStatus.KILLED,
    EventType.EVICT: FinalStatus.EVICTED,
    EventType.LOST: FinalStatus.LOST,
}

# Kill and Lost are accepted from Pending (a job can be killed before it is
# ever scheduled); Evict is not, eviction only removes running work.
_TRANSITIONS = {
    (LifecycleState.UNSUBMITTED, EventType.SUBMIT): LifecycleState.PENDING,
    (LifecycleState.PENDING, EventType.SCHEDULE): LifecycleState.RUNNING,
    (LifecycleState.PENDING, EventType.FAIL): LifecycleState.DEAD,
    (LifecycleState.PENDING, EventType.KILL): LifecycleState.DEAD,
    (LifecycleState.PENDING, EventType.LOST): LifecycleState.DEAD,
    (LifecycleState.PENDING, EventType.UPDATE_PENDING): LifecycleState.PENDING,
    (LifecycleState.RUNNING, EventType.EVICT): LifecycleState.DEAD,
    (LifecycleState.RUNNING, EventType.FAIL): LifecycleState.DEAD,
    (LifecycleState.RUNNING, EventType.FINISH): LifecycleState.DEAD,
    (LifecycleState.RUNNING, EventType.KILL): LifecycleState.DEAD,
    (LifecycleState.RUNNING, EventType.LOST): LifecycleState.DEAD,
    (LifecycleState.RUNNING, EventType.UPDATE_RUNNING): LifecycleState.RUNNING,
    (LifecycleState.DEAD, EventType.SUBMIT): LifecycleState.PENDING,
}


class InvalidTransition(ValueError):
    """Raised for a (state, event) pair outside the transition table."""

    def __init__(self, state: LifecycleState, event: EventType, index: int | None = None):
        self.state = state
        self.event = event
        self.index = index
        where = "" if index is None else f" at event index {index}"
        super().__init__(f"no transition from {state.value} on {event.name}{where}")


def apply_event(state: LifecycleState, event: EventType) -> LifecycleState:
    """Return the successor state, or raise InvalidTransition."""
    try:
        return _TRANSITIONS[(state, event)]
    except KeyError:
        raise InvalidTransition(state, event) from None


def replay(events: Sequence[EventType]) -> Tuple[LifecycleState, int]:
    """Fold a time-ordered event sequence from Unsubmitted.

    Returns (final state, resubmission count), where resubmissions are
    Submit events after the first. InvalidTransition carries the index of
    the offending event.
    """
    state = LifecycleState.UNSUBMITTED
    resubmissions = 0
    seen_submit = False
    for i, event in enumerate(events):
        try:
            state = _TRANSITIONS[(state, event)]
        except KeyError:
            raise InvalidTransition(state, event, index=i) from None
        if event is EventType.SUBMIT:
            if seen_submit:
                resubmissions += 1
            seen_submit = True
    return state, resubmissions


def classify_final_status(events: Iterable[EventType]) -> FinalStatus:
    """Classify a task/job's final status from its time-ordered events.

    Total function: a sequence ending on a terminal event maps to that
    event's status; a task that never left the pending side is Unscheduled;
    everything else (empty or truncated mid-lifecycle) is Lost, mirroring
    the treatment of records with missing information.
    """
    events = list(events)
    if not events:
        return FinalStatus.LOST
    last = events[-1]
    if last in STATUS_FOR_TERMINAL:
        return STATUS_FOR_TERMINAL[last]
    if all(e in (EventType.SUBMIT, EventType.UPDATE_PENDING) for e in events):
        return FinalStatus.UNSCHEDULED
    return FinalStatus.LOST


def count_resubmissions(events: Iterable[EventType]) -> int:
    """Submit events after the first (0 for a never-resubmitted task)."""
    n = sum(1 for e in events if e is EventType.SUBMIT)
    return max(0, n - 1)
