"""Near-edge weighted loss, toy context-fusion decoder and saliency metrics."""

__version__ = "0.1.0"

from ._accel import USE_NUMBA, backend_name
from .edt import build_nem, distance_transform, distance_transform_sq, edge_tf
from .loss import LossConfig, bce_loss, bce_map, newloss, newloss_grad
from .metrics import (
    MetricsReport,
    ThresholdSweep,
    evaluate,
    f_measures,
    mae,
    pr_curve,
    s_measure,
    threshold_confusion,
)

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "build_nem",
    "distance_transform",
    "distance_transform_sq",
    "edge_tf",
    "LossConfig",
    "bce_loss",
    "bce_map",
    "newloss",
    "newloss_grad",
    "MetricsReport",
    "ThresholdSweep",
    "evaluate",
    "f_measures",
    "mae",
    "pr_curve",
    "s_measure",
    "threshold_confusion",
]
