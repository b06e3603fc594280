"""Feature schemas and dataset assembly for the outcome predictors.

The binary label is 1 for every final status other than Finished (the
fail class is the positive class throughout). Service time is excluded
from the default schemas: it is only known once the outcome is, so a
predictor consulted at dispatch time cannot use it.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from ..lifecycle import FinalStatus


class EmptyDataset(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


class TooFewSamples(ValueError):
    pass


TASK_FEATURE_NAMES: List[str] = [
    "scheduling_class",
    "priority",
    "requested_cpu",
    "requested_ram",
    "requested_disk",
    "used_cpu",
    "used_ram",
    "used_disk",
    "prev_finished",
    "prev_killed",
    "prev_failed",
    "prev_evicted",
    "prev_lost",
    "prev_unscheduled",
    "reschedule_count",
    "waiting_time",
]

JOB_FEATURE_NAMES: List[str] = [
    "scheduling_class",
    "n_finished",
    "n_killed",
    "n_failed",
    "n_evicted",
    "n_lost",
    "n_unscheduled",
    "total_tasks",
    "waiting_time",
]


def fail_label(status: FinalStatus) -> int:
    return 0 if status is FinalStatus.FINISHED else 1


def dataset_from_attributes(
    records: Sequence, feature_names: Sequence[str]
) -> Tuple[np.ndarray, np.ndarray]:
    """Attribute records -> (X, y) using the given feature fields."""
    if not records:
        raise EmptyDataset("no attribute records")
    X = np.empty((len(records), len(feature_names)), dtype=np.float64)
    y = np.empty(len(records), dtype=np.int8)
    for i, r in enumerate(records):
        for j, name in enumerate(feature_names):
            X[i, j] = float(getattr(r, name))
        y[i] = fail_label(r.final_status)
    return X, y


def check_training_data(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ArityMismatch(f"X {X.shape} does not match y {y.shape}")
    if X.shape[0] == 0:
        raise EmptyDataset("no samples")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary (0/1)")
    return X, y.astype(np.uint8)


def check_feature_arity(X: np.ndarray, n_features: int) -> np.ndarray:
    """Validate prediction input; returns a 2-D float64 view/copy."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[np.newaxis, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ArityMismatch(f"expected {n_features} features, got shape {X.shape}")
    return X
