"""Confusion counts and derived rates; the fail class is positive."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..stats import LengthMismatch


@dataclass
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float
    precision: Optional[float]  # absent (None) when TP+FP = 0
    recall: Optional[float]  # absent (None) when TP+FN = 0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
        }


def confusion_metrics(predicted: Sequence[int], actual: Sequence[int]) -> Metrics:
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1 or len(predicted) == 0:
        raise LengthMismatch(
            f"predicted {predicted.shape} and actual {actual.shape} must be equal, nonempty"
        )
    p = predicted.astype(bool)
    a = actual.astype(bool)
    tp = int(np.count_nonzero(p & a))
    tn = int(np.count_nonzero(~p & ~a))
    fp = int(np.count_nonzero(p & ~a))
    fn = int(np.count_nonzero(~p & a))
    return Metrics(
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        accuracy=(tp + tn) / (tp + tn + fp + fn),
        precision=tp / (tp + fp) if tp + fp else None,
        recall=tp / (tp + fn) if tp + fn else None,
    )
