"""Optimization algorithms."""

from typing import Sequence

from pydantic import BaseModel, Field

from ..core.exceptions import ShapeError
from .tensor import Tensor


class SgdOptimizer(BaseModel):
    """Mini-batch stochastic gradient descent."""

    learning_rate: float = Field(default=0.1, gt=0.0)
    batch_size: int = Field(default=32, ge=1)


def sgd_step(
    parameters: Sequence[Sequence[Tensor]],
    gradients: Sequence[Sequence[Tensor]],
    learning_rate: float,
) -> None:
    """In place ``p <- p - learning_rate * g`` for congruent structures."""
    if len(parameters) != len(gradients):
        raise ShapeError(f"{len(parameters)} parameter groups vs {len(gradients)} gradient groups")
    for params, grads in zip(parameters, gradients):
        if len(params) != len(grads):
            raise ShapeError("parameter and gradient groups differ in length")
        for p, g in zip(params, grads):
            if p.shape != g.shape:
                raise ShapeError(f"parameter {p.shape} vs gradient {g.shape}")
            p -= learning_rate * g
