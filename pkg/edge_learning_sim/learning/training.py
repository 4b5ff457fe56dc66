"""Training strategy and the mini-batch SGD training loop."""

import enum
import math
from typing import List

import numpy as np
from pydantic import BaseModel, Field

from ..core.exceptions import InvalidArgumentError, ShapeError
from ..core.logging import get_logger
from ..core.rng import RandomStream
from .dataset import DataSet, Split
from .losses import LossIndex, loss
from .network import NeuralNetwork
from .optimizers import SgdOptimizer, sgd_step
from .serialization import parameters_digest

logger = get_logger(__name__)

SHUFFLE_STREAM = "training/shuffle"


class StopReason(str, enum.Enum):
    LOSS_GOAL_REACHED = "LOSS_GOAL_REACHED"
    MAX_EPOCHS = "MAX_EPOCHS"


class TrainingStrategy(BaseModel):
    """Loss index, optimization algorithm and stopping criteria."""

    loss: LossIndex = Field(default=LossIndex.MSE)
    optimizer: SgdOptimizer = Field(default_factory=SgdOptimizer)
    max_epochs: int = Field(default=100, ge=1, description="Maximum training rounds")
    loss_goal: float = Field(default=0.0, description="Stop once the epoch loss is at or below this")
    seed: int = Field(default=0, ge=0, description="Seed of the shuffling stream")


class TrainingReport(BaseModel):
    epoch_losses: List[float] = Field(default_factory=list)
    stop_reason: StopReason
    final_parameters_digest: str
    samples: int = Field(default=0, ge=0)

    @property
    def epochs_run(self) -> int:
        return len(self.epoch_losses)

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1] if self.epoch_losses else math.nan


def train(net: NeuralNetwork, dataset: DataSet, strategy: TrainingStrategy) -> TrainingReport:
    """Train ``net`` in place on the TRAIN rows of ``dataset``.

    Each epoch shuffles the rows from a stream seeded by ``strategy.seed``,
    applies one SGD step per mini-batch, then measures the mean loss over the
    whole TRAIN split with the updated parameters.
    """
    inputs = dataset.inputs(Split.TRAIN)
    targets = dataset.targets(Split.TRAIN)
    rows = inputs.shape[0]
    if rows == 0:
        raise InvalidArgumentError("Training needs at least one TRAIN row")
    if inputs.shape[1] != net.input_size:
        raise ShapeError(f"network takes {net.input_size} inputs, data set has {inputs.shape[1]}")
    if targets.shape[1] != net.output_size:
        raise ShapeError(f"network produces {net.output_size} outputs, data set has {targets.shape[1]} targets")

    stream = RandomStream(SHUFFLE_STREAM, strategy.seed)
    batch_size = strategy.optimizer.batch_size
    learning_rate = strategy.optimizer.learning_rate
    epoch_losses: List[float] = []
    stop_reason = StopReason.MAX_EPOCHS

    for epoch in range(1, strategy.max_epochs + 1):
        order = list(range(rows))
        stream.shuffle(order)
        for start in range(0, rows, batch_size):
            batch = np.array(order[start : start + batch_size])
            gradients = net.backward(inputs[batch], targets[batch], strategy.loss)
            sgd_step(net.parameters(), gradients, learning_rate)
        epoch_loss = loss(strategy.loss, net.forward(inputs), targets)
        epoch_losses.append(epoch_loss)
        logger.debug(f"epoch {epoch}: loss={epoch_loss:.6g}")
        if epoch_loss <= strategy.loss_goal:
            stop_reason = StopReason.LOSS_GOAL_REACHED
            break

    if not math.isfinite(epoch_losses[-1]):
        logger.warning(f"Training diverged: final loss {epoch_losses[-1]}")
    return TrainingReport(
        epoch_losses=epoch_losses,
        stop_reason=stop_reason,
        final_parameters_digest=parameters_digest(net),
        samples=rows,
    )
