"""Self-describing JSON serialization for trained models.

Floats are emitted with repr (shortest round-trip), so a reloaded model
is bit-exact: identical predictions, identical re-serialization.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .forest import Forest
from .glm import GlmModel
from .tree import DecisionTree

FORMAT_VERSION = 1


def _tree_to_dict(tree: DecisionTree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "w0": tree.w0.tolist(),
        "w1": tree.w1.tolist(),
        "decrease": tree.decrease.tolist(),
    }


def _tree_from_dict(data: dict, n_features, max_depth, min_leaf, seed, names) -> DecisionTree:
    return DecisionTree(
        feature=np.asarray(data["feature"], dtype=np.int32),
        threshold=np.asarray(data["threshold"], dtype=np.float64),
        left=np.asarray(data["left"], dtype=np.int32),
        right=np.asarray(data["right"], dtype=np.int32),
        w0=np.asarray(data["w0"], dtype=np.int64),
        w1=np.asarray(data["w1"], dtype=np.int64),
        decrease=np.asarray(data["decrease"], dtype=np.float64),
        n_features=n_features,
        max_depth=max_depth,
        min_leaf=min_leaf,
        seed=seed,
        feature_names=names,
    )


def model_to_dict(model) -> dict:
    if isinstance(model, DecisionTree):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "tree",
            "n_features": model.n_features,
            "feature_names": model.feature_names,
            "params": {"max_depth": model.max_depth, "min_leaf": model.min_leaf},
            "seed": model.seed,
            "nodes": _tree_to_dict(model),
        }
    if isinstance(model, Forest):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "forest",
            "n_features": model.n_features,
            "feature_names": model.feature_names,
            "params": {
                "n_trees": model.n_trees,
                "features_per_split": model.features_per_split,
                "bootstrap": model.bootstrap,
                "max_depth": model.max_depth,
                "min_leaf": model.min_leaf,
            },
            "seed": model.seed,
            "trees": [_tree_to_dict(t) for t in model.trees],
        }
    if isinstance(model, GlmModel):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "glm",
            "n_features": model.n_features,
            "feature_names": model.feature_names,
            "params": {"l2": model.l2},
            "seed": 0,
            "weights": model.weights.tolist(),
            "converged": model.converged,
            "n_iter": model.n_iter,
        }
    raise TypeError(f"cannot serialize {type(model)!r}")


def model_from_dict(data: dict):
    kind = data["kind"]
    names = data.get("feature_names")
    if kind == "tree":
        p = data["params"]
        return _tree_from_dict(
            data["nodes"], data["n_features"], p["max_depth"], p["min_leaf"],
            data["seed"], names,
        )
    if kind == "forest":
        p = data["params"]
        trees = [
            _tree_from_dict(
                t, data["n_features"], p["max_depth"], p["min_leaf"], data["seed"], names
            )
            for t in data["trees"]
        ]
        return Forest(
            trees=trees,
            n_trees=p["n_trees"],
            features_per_split=p["features_per_split"],
            bootstrap=p["bootstrap"],
            max_depth=p["max_depth"],
            min_leaf=p["min_leaf"],
            seed=data["seed"],
            feature_names=names,
        )
    if kind == "glm":
        return GlmModel(
            weights=np.asarray(data["weights"], dtype=np.float64),
            converged=data["converged"],
            n_iter=data["n_iter"],
            l2=data["params"]["l2"],
            feature_names=names,
        )
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path: Union[str, Path]):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
