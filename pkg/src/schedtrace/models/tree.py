"""CART decision tree (Gini impurity, binary labels) on the shared kernel."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .._kernels import grow_tree
from .data import check_feature_arity, check_training_data


@dataclass
class DecisionTree:
    """Flat node-array representation.

    feature[i] is the split feature of node i (-1 for a leaf), with rows
    satisfying value < threshold[i] sent to left[i]. w0/w1 are the weighted
    class counts that reached the node; a leaf predicts the majority class,
    ties going to the fail class. decrease[i] is the weighted Gini decrease
    of the split at node i (0 at leaves), normalized by the root weight.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    decrease: np.ndarray
    n_features: int
    max_depth: int
    min_leaf: int
    seed: int
    feature_names: Optional[List[str]] = None

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return (
            self.n_features == other.n_features
            and np.array_equal(self.feature, other.feature)
            and np.array_equal(self.threshold, other.threshold)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
            and np.array_equal(self.w0, other.w0)
            and np.array_equal(self.w1, other.w1)
        )


def compute_sort_index(X: np.ndarray) -> np.ndarray:
    """Per-feature stable argsort, shared by every tree grown on X."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T.astype(np.int32))


def train_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    max_depth: int = 12,
    min_leaf: int = 5,
    seed: int = 0,
    features_per_split: Optional[int] = None,
    feature_names: Optional[Sequence[str]] = None,
    sample_weight: Optional[np.ndarray] = None,
    sort_idx: Optional[np.ndarray] = None,
) -> DecisionTree:
    """Grow a CART tree.

    Splits minimize the weighted child Gini sum over midpoint thresholds
    between consecutive distinct sorted values; ties break toward the
    lowest feature index, then the lowest threshold. features_per_split
    defaults to all features (no subsampling).
    """
    X, y = check_training_data(X, y)
    n, k = X.shape
    if sort_idx is None:
        sort_idx = compute_sort_index(X)
    if sample_weight is None:
        sample_weight = np.ones(n, dtype=np.int64)
    m = k if features_per_split is None else features_per_split
    nodes = grow_tree(X, y, sort_idx, sample_weight, max_depth, min_leaf, m, seed)
    return DecisionTree(
        feature=nodes["feature"],
        threshold=nodes["threshold"],
        left=nodes["left"],
        right=nodes["right"],
        w0=nodes["w0"],
        w1=nodes["w1"],
        decrease=nodes["decrease"],
        n_features=k,
        max_depth=max_depth,
        min_leaf=min_leaf,
        seed=seed,
        feature_names=list(feature_names) if feature_names is not None else None,
    )


def apply_tree(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    """Leaf index for each row of X."""
    X = check_feature_arity(X, tree.n_features)
    nodes = np.zeros(X.shape[0], dtype=np.int32)
    active = np.flatnonzero(tree.feature[nodes] >= 0)
    while active.size:
        cur = nodes[active]
        f = tree.feature[cur]
        go_left = X[active, f] < tree.threshold[cur]
        nodes[active] = np.where(go_left, tree.left[cur], tree.right[cur])
        active = active[tree.feature[nodes[active]] >= 0]
    return nodes


def predict_tree(tree: DecisionTree, X: np.ndarray):
    """Predicted label(s): 1 = fail class. 1-D input yields a scalar."""
    single = np.asarray(X).ndim == 1
    leaves = apply_tree(tree, X)
    labels = (tree.w1[leaves] >= tree.w0[leaves]).astype(np.int8)
    return int(labels[0]) if single else labels
