"""Testing analysis: evaluate a model over the TEST rows of a data set."""

from typing import List, Optional, Protocol

import numpy as np
from pydantic import BaseModel, Field

from ..core.exceptions import InvalidArgumentError
from .dataset import DataSet, Split
from .losses import LossIndex, loss
from .tensor import Tensor


class Predictor(Protocol):
    """Anything that maps input batches to output batches."""

    @property
    def is_classifier(self) -> bool:
        ...

    def forward(self, batch: Tensor) -> Tensor:
        ...


class TestingReport(BaseModel):
    loss: float
    rows: int = Field(ge=0)
    accuracy: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    confusion: Optional[List[List[int]]] = None


def confusion_matrix(predicted: Tensor, target: Tensor) -> List[List[int]]:
    """Rows are target classes, columns predicted classes (argmax, ties to lowest)."""
    classes = target.shape[1]
    matrix = np.zeros((classes, classes), dtype=np.int64)
    np.add.at(matrix, (target.argmax(axis=1), predicted.argmax(axis=1)), 1)
    return matrix.tolist()


def evaluate(
    model: Predictor,
    dataset: DataSet,
    index: Optional[LossIndex] = None,
    split: Split = Split.TEST,
) -> TestingReport:
    """Loss over the ``split`` rows; classifiers also get accuracy and confusion.

    The loss index defaults to cross-entropy for classifiers and MSE otherwise.
    The model is only read.
    """
    inputs = dataset.inputs(split)
    targets = dataset.targets(split)
    if inputs.shape[0] == 0:
        raise InvalidArgumentError(f"Evaluation needs at least one {Split(split).value} row")
    predicted = model.forward(inputs).reshape(targets.shape[0], -1)
    if index is None:
        index = LossIndex.CROSS_ENTROPY if model.is_classifier else LossIndex.MSE
    report = TestingReport(loss=loss(index, predicted, targets), rows=inputs.shape[0])
    if model.is_classifier:
        confusion = confusion_matrix(predicted, targets)
        correct = sum(confusion[i][i] for i in range(len(confusion)))
        report.accuracy = correct / inputs.shape[0]
        report.confusion = confusion
    return report
