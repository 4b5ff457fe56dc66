"""Loss indices: the error term minimized during training."""

import enum

import numpy as np

from ..core.exceptions import InvalidArgumentError, ShapeError
from .tensor import Tensor

# log() floor for cross-entropy; bounds the smallest reachable loss per sample
PROBABILITY_FLOOR = 1e-12
ROW_SUM_TOLERANCE = 1e-6


class LossIndex(str, enum.Enum):
    MSE = "mse"
    CROSS_ENTROPY = "cross_entropy"


def _as_rows(predicted: Tensor, target: Tensor):
    predicted = np.asarray(predicted, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if predicted.shape != target.shape:
        raise ShapeError(f"predicted {predicted.shape} vs target {target.shape}")
    if predicted.ndim == 1:
        return predicted.reshape(1, -1), target.reshape(1, -1)
    return predicted.reshape(predicted.shape[0], -1), target.reshape(target.shape[0], -1)


def _check_probabilities(predicted: Tensor) -> None:
    sums = predicted.sum(axis=1)
    if np.any(predicted < 0) or np.any(predicted > 1) or np.any(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE):
        raise InvalidArgumentError("Cross-entropy needs probability rows (components in [0, 1], sum 1)")


def loss(index: LossIndex, predicted: Tensor, target: Tensor) -> float:
    """Mean squared error over all elements, or mean per-sample cross-entropy."""
    p, t = _as_rows(predicted, target)
    index = LossIndex(index)
    if index is LossIndex.MSE:
        return float(np.mean((p - t) ** 2))
    _check_probabilities(p)
    return float(-np.mean(np.sum(t * np.log(np.maximum(p, PROBABILITY_FLOOR)), axis=1)))


def loss_gradient(index: LossIndex, predicted: Tensor, target: Tensor) -> Tensor:
    """Gradient of :func:`loss` with respect to ``predicted``."""
    p, t = _as_rows(predicted, target)
    index = LossIndex(index)
    if index is LossIndex.MSE:
        grad = 2.0 * (p - t) / p.size
    else:
        _check_probabilities(p)
        clamped = p >= PROBABILITY_FLOOR
        grad = np.where(clamped, -t / np.maximum(p, PROBABILITY_FLOOR), 0.0) / p.shape[0]
    return grad.reshape(np.shape(predicted))
