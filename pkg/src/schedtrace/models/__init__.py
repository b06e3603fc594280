"""Supervised outcome predictors: CART tree, random forest, logistic GLM."""

from .data import (
    ArityMismatch,
    EmptyDataset,
    JOB_FEATURE_NAMES,
    TASK_FEATURE_NAMES,
    TooFewSamples,
    dataset_from_attributes,
    fail_label,
)
from .forest import Forest, forest_votes, gini_importance, predict_forest, train_forest
from .glm import GlmModel, loglik, loglik_grad, predict_glm, train_logistic
from .io import load_model, model_from_dict, model_to_dict, save_model
from .metrics import Metrics, confusion_metrics
from .tree import DecisionTree, apply_tree, predict_tree, train_tree
from .validate import (
    CvResult,
    MODEL_KINDS,
    ModelSpec,
    cross_validate,
    fold_indices,
    predict_model,
    train_model,
)

__all__ = [
    "ArityMismatch",
    "CvResult",
    "DecisionTree",
    "EmptyDataset",
    "Forest",
    "GlmModel",
    "JOB_FEATURE_NAMES",
    "MODEL_KINDS",
    "Metrics",
    "ModelSpec",
    "TASK_FEATURE_NAMES",
    "TooFewSamples",
    "apply_tree",
    "confusion_metrics",
    "cross_validate",
    "dataset_from_attributes",
    "fail_label",
    "fold_indices",
    "forest_votes",
    "gini_importance",
    "load_model",
    "loglik",
    "loglik_grad",
    "model_from_dict",
    "model_to_dict",
    "predict_forest",
    "predict_glm",
    "predict_model",
    "predict_tree",
    "save_model",
    "train_forest",
    "train_logistic",
    "train_model",
    "train_tree",
]
