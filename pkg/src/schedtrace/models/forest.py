"""Random forest: bootstrapped CART trees with per-node feature subsampling.

Forests are deterministic in (data order, seed) regardless of how many
worker processes train the trees: every tree's bootstrap resample and
split-sampling stream derive only from the forest seed and the tree index,
and trees are always merged in index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .._kernels import splitmix64
from .data import check_feature_arity, check_training_data
from .tree import DecisionTree, compute_sort_index, predict_tree, train_tree


@dataclass
class Forest:
    trees: List[DecisionTree]
    n_trees: int
    features_per_split: int
    bootstrap: bool
    max_depth: int
    min_leaf: int
    seed: int
    feature_names: Optional[List[str]] = None

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def __eq__(self, other) -> bool:
        if not isinstance(other, Forest):
            return NotImplemented
        return (
            self.n_trees == other.n_trees
            and self.seed == other.seed
            and all(a == b for a, b in zip(self.trees, other.trees))
        )


def tree_seeds(seed: int, n_trees: int) -> List[int]:
    state = seed
    seeds = []
    for _ in range(n_trees):
        state, z = splitmix64(state)
        seeds.append(z)
    return seeds


def _bootstrap_weights(tree_seed: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(tree_seed)
    return np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.int64)


def _train_batch(args):
    X, y, sort_idx, seeds, bootstrap, max_depth, min_leaf, m = args
    n = X.shape[0]
    out = []
    for s in seeds:
        weight = _bootstrap_weights(s, n) if bootstrap else None
        out.append(
            train_tree(
                X,
                y,
                max_depth=max_depth,
                min_leaf=min_leaf,
                seed=s,
                features_per_split=m,
                sample_weight=weight,
                sort_idx=sort_idx,
            )
        )
    return out


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    *,
    n_trees: int = 100,
    features_per_split: Optional[int] = None,
    bootstrap: bool = True,
    max_depth: int = 12,
    min_leaf: int = 5,
    seed: int = 0,
    n_jobs: int = 1,
    feature_names: Optional[Sequence[str]] = None,
) -> Forest:
    """Train n_trees CART trees; features_per_split defaults to
    floor(sqrt(n_features)) (at least 1)."""
    X, y = check_training_data(X, y)
    k = X.shape[1]
    m = features_per_split if features_per_split is not None else max(1, int(math.isqrt(k)))
    sort_idx = compute_sort_index(X)
    seeds = tree_seeds(seed, n_trees)

    if n_jobs <= 1 or n_trees == 1:
        trees = _train_batch((X, y, sort_idx, seeds, bootstrap, max_depth, min_leaf, m))
    else:
        n_jobs = min(n_jobs, n_trees)
        chunks = [
            (X, y, sort_idx, seeds[i::n_jobs], bootstrap, max_depth, min_leaf, m)
            for i in range(n_jobs)
        ]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_train_batch, chunks))
        # Chunk i holds trees i, i+n_jobs, ...; restore index order.
        trees = [None] * n_trees
        for i, batch in enumerate(results):
            for j, tree in enumerate(batch):
                trees[i + j * n_jobs] = tree

    return Forest(
        trees=trees,
        n_trees=n_trees,
        features_per_split=m,
        bootstrap=bootstrap,
        max_depth=max_depth,
        min_leaf=min_leaf,
        seed=seed,
        feature_names=list(feature_names) if feature_names is not None else None,
    )


def forest_votes(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Number of trees voting fail-class per row."""
    X = check_feature_arity(X, forest.n_features)
    votes = np.zeros(X.shape[0], dtype=np.int32)
    for tree in forest.trees:
        votes += predict_tree(tree, X)
    return votes


def predict_forest(forest: Forest, X: np.ndarray):
    """Majority vote; exact ties predict the fail class (rescheduling a
    healthy task is cheaper than running a doomed one)."""
    single = np.asarray(X).ndim == 1
    votes = forest_votes(forest, X)
    labels = (2 * votes >= forest.n_trees).astype(np.int8)
    return int(labels[0]) if single else labels


def gini_importance(forest: Forest) -> np.ndarray:
    """Mean decrease in Gini impurity per feature.

    Sums each tree's recorded weighted impurity decreases over the nodes
    splitting on a feature, then averages over trees. Features never used
    in any split score 0.
    """
    k = forest.n_features
    totals = np.zeros(k, dtype=np.float64)
    for tree in forest.trees:
        split = tree.feature >= 0
        np.add.at(totals, tree.feature[split], tree.decrease[split])
    return totals / forest.n_trees
