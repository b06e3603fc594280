"""Seeded k-fold cross validation over a pluggable model-kind registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .._kernels import splitmix64
from .data import TooFewSamples, check_training_data
from .forest import predict_forest, train_forest
from .glm import predict_glm, train_logistic
from .metrics import Metrics, confusion_metrics
from .tree import predict_tree, train_tree


@dataclass(frozen=True)
class ModelSpec:
    """A model kind plus its training parameters.

    Kinds registered here: "tree", "forest", "glm". New families plug in
    by adding a (train, predict) pair to MODEL_KINDS.
    """

    kind: str
    params: dict = field(default_factory=dict)


def _train_tree(X, y, seed, **params):
    return train_tree(X, y, seed=seed, **params)


def _train_forest(X, y, seed, **params):
    return train_forest(X, y, seed=seed, **params)


def _train_glm(X, y, seed, **params):
    # Logistic training is deterministic; the seed is part of the shared
    # trainer signature but unused.
    return train_logistic(X, y, **params)


MODEL_KINDS: Dict[str, Tuple[Callable, Callable]] = {
    "tree": (_train_tree, predict_tree),
    "forest": (_train_forest, predict_forest),
    "glm": (_train_glm, predict_glm),
}


def train_model(spec: ModelSpec, X, y, seed: int = 0):
    if spec.kind not in MODEL_KINDS:
        raise KeyError(f"unknown model kind {spec.kind!r}; have {sorted(MODEL_KINDS)}")
    trainer, _ = MODEL_KINDS[spec.kind]
    return trainer(X, y, seed, **spec.params)


def predict_model(model, X):
    from .forest import Forest
    from .glm import GlmModel
    from .tree import DecisionTree

    if isinstance(model, Forest):
        return predict_forest(model, X)
    if isinstance(model, DecisionTree):
        return predict_tree(model, X)
    if isinstance(model, GlmModel):
        return predict_glm(model, X)
    raise TypeError(f"unknown model type {type(model)!r}")


@dataclass
class CvResult:
    k: int
    seed: int
    spec: ModelSpec
    folds: List[Metrics]
    accuracy: float
    precision: Optional[float]
    recall: Optional[float]

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "model": self.spec.kind,
            "params": dict(self.spec.params),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "folds": [m.as_dict() for m in self.folds],
        }


def fold_indices(n: int, k: int, seed: int) -> List[np.ndarray]:
    """Deterministic seeded shuffle split into k near-equal folds."""
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, k)


def cross_validate(X, y, spec: ModelSpec, k: int = 10, seed: int = 0) -> CvResult:
    """k-fold CV: fold i tests a model trained on the other folds.

    Fold membership depends only on (n, k, seed), so different model specs
    evaluated with the same seed see identical folds.
    """
    X, y = check_training_data(X, y)
    n = len(y)
    if k < 2 or n < k:
        raise TooFewSamples(f"need 2 <= k <= n, got k={k}, n={n}")
    folds = fold_indices(n, k, seed)

    results: List[Metrics] = []
    state = seed
    for i, test_idx in enumerate(folds):
        state, fold_seed = splitmix64(state)
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        model = train_model(spec, X[train_idx], y[train_idx], seed=fold_seed)
        predicted = predict_model(model, X[test_idx])
        results.append(confusion_metrics(predicted, y[test_idx]))

    def mean_defined(values):
        defined = [v for v in values if v is not None]
        return sum(defined) / len(defined) if defined else None

    return CvResult(
        k=k,
        seed=seed,
        spec=spec,
        folds=results,
        accuracy=sum(m.accuracy for m in results) / k,
        precision=mean_defined(m.precision for m in results),
        recall=mean_defined(m.recall for m in results),
    )
