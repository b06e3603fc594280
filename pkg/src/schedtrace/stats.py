"""Status distributions and the statistical screens used on attribute tables.

summarize() reproduces the per-status count/percentage tables plus
five-number summaries of waiting and service times (log-scale plotting
needs only those). spearman() and vif() are the association and
multicollinearity screens applied to feature columns before modelling;
features with VIF above 5 are conventionally flagged as collinear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .lifecycle import FinalStatus

VIF_COLLINEAR_THRESHOLD = 5.0


class EmptyInput(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


@dataclass
class FiveNumber:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def as_dict(self) -> dict:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
        }


@dataclass
class StatusSummary:
    total: int
    counts: Dict[FinalStatus, int]
    percentages: Dict[FinalStatus, float]
    waiting: Dict[FinalStatus, FiveNumber]
    service: Dict[FinalStatus, FiveNumber]

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "counts": {s.value: self.counts[s] for s in FinalStatus},
            "percentages": {s.value: self.percentages[s] for s in FinalStatus},
            "waiting_time": {
                s.value: self.waiting[s].as_dict() for s in FinalStatus if s in self.waiting
            },
            "service_time": {
                s.value: self.service[s].as_dict() for s in FinalStatus if s in self.service
            },
        }


def _five_number(values: List[int]) -> FiveNumber:
    arr = np.asarray(values, dtype=np.float64)
    q = np.percentile(arr, [0, 25, 50, 75, 100])
    return FiveNumber(*(float(v) for v in q))


def summarize(records: Sequence) -> StatusSummary:
    """Counts, percentages, and waiting/service five-number summaries
    per final status, over task or job attribute records."""
    records = list(records)
    if not records:
        raise EmptyInput("no records to summarize")
    counts = {s: 0 for s in FinalStatus}
    waiting: Dict[FinalStatus, List[int]] = {s: [] for s in FinalStatus}
    service: Dict[FinalStatus, List[int]] = {s: [] for s in FinalStatus}
    for r in records:
        counts[r.final_status] += 1
        waiting[r.final_status].append(r.waiting_time)
        service[r.final_status].append(r.service_time)
    total = len(records)
    percentages = {s: 100.0 * counts[s] / total for s in FinalStatus}
    return StatusSummary(
        total=total,
        counts=counts,
        percentages=percentages,
        waiting={s: _five_number(v) for s, v in waiting.items() if v},
        service={s: _five_number(v) for s, v in service.items() if v},
    )


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing the average of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    n = len(values)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"shapes {x.shape} and {y.shape} differ")
    if len(x) < 2:
        raise LengthMismatch("need at least 2 observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInput("constant vector has no rank correlation")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    rho = float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    return max(-1.0, min(1.0, rho))


def vif(design: np.ndarray, j: int) -> float:
    """Variance inflation factor of column j: 1 / (1 - R^2) from regressing
    it on all other columns plus an intercept.

    Exactly collinear designs return math.inf rather than raising. A tiny
    ridge keeps near-singular normal equations solvable.
    """
    design = np.asarray(design, dtype=np.float64)
    if design.ndim != 2 or design.shape[1] < 2:
        raise DegenerateInput("design needs at least two columns")
    n, k = design.shape
    if n <= k:
        raise DegenerateInput(f"need more rows than columns, got {n}x{k}")
    target = design[:, j]
    if np.all(target == target[0]):
        raise DegenerateInput(f"column {j} is constant")
    others = np.delete(design, j, axis=1)
    X = np.column_stack([np.ones(n), others])
    XtX = X.T @ X
    XtX[np.diag_indices_from(XtX)] += 1e-12
    try:
        beta = np.linalg.solve(XtX, X.T @ target)
    except np.linalg.LinAlgError:
        return math.inf
    residual = target - X @ beta
    ss_res = float(residual @ residual)
    centered = target - target.mean()
    ss_tot = float(centered @ centered)
    ratio = ss_res / ss_tot
    if ratio < 1e-9:
        return math.inf
    return 1.0 / ratio


def vif_table(design: np.ndarray, names: Sequence[str]) -> List[dict]:
    """VIF for every non-constant column, with the >5 collinearity flag."""
    design = np.asarray(design, dtype=np.float64)
    rows = []
    for j, name in enumerate(names):
        col = design[:, j]
        if np.all(col == col[0]):
            rows.append({"feature": name, "vif": None, "collinear": None})
            continue
        value = vif(design, j)
        rows.append(
            {
                "feature": name,
                "vif": None if math.isinf(value) else value,
                "collinear": value > VIF_COLLINEAR_THRESHOLD,
            }
        )
    return rows
