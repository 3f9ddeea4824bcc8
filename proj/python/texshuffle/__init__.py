"""Patch-and-shuffle texture classification toolkit."""

import torch  # noqa: F401  loads the libtorch build the extension links against

from ._core import (
    CLASS_NAMES,
    Dataset,
    IngestionError,
    PretrainedWeightsUnavailable,
    TrainingError,
    ValidationError,
    augment,
    backbone_features,
    confusion_matrix,
    normalize_for_backbone,
    overall_accuracy,
    parse_label,
    patch_and_shuffle,
    patch_grid,
    per_class_accuracy,
    run_experiment,
    shuffled_patch_order,
)

__all__ = [
    "CLASS_NAMES",
    "Dataset",
    "IngestionError",
    "PretrainedWeightsUnavailable",
    "TrainingError",
    "ValidationError",
    "augment",
    "backbone_features",
    "confusion_matrix",
    "normalize_for_backbone",
    "overall_accuracy",
    "parse_label",
    "patch_and_shuffle",
    "patch_grid",
    "per_class_accuracy",
    "run_experiment",
    "shuffled_patch_order",
]
