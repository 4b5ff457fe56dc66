"""Ensembles of independently trained sub-models."""

import enum
from typing import List, Sequence

import numpy as np

from ..core.exceptions import InvalidArgumentError, ShapeError
from .tensor import Tensor
from .testing import Predictor


class CombineMode(str, enum.Enum):
    SOFT_VOTE = "soft_vote"
    HARD_VOTE = "hard_vote"


class EnsembleModel:
    """Uniform combination of sub-model outputs.

    SOFT_VOTE averages output vectors; HARD_VOTE averages one-hot argmax votes
    (ties to the lowest class index).
    """

    def __init__(self, members: Sequence[Predictor], combine: CombineMode = CombineMode.SOFT_VOTE):
        if not members:
            raise InvalidArgumentError("An ensemble needs at least one sub-model")
        self.members: List[Predictor] = list(members)
        self.combine = CombineMode(combine)

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"EnsembleModel(members={len(self.members)}, combine={self.combine.value})"

    @property
    def is_classifier(self) -> bool:
        return all(member.is_classifier for member in self.members)

    def member_outputs(self, batch: Tensor) -> List[Tensor]:
        outputs = [np.asarray(member.forward(batch), dtype=np.float64) for member in self.members]
        shapes = {o.shape for o in outputs}
        if len(shapes) != 1:
            raise ShapeError(f"sub-model outputs disagree: {sorted(shapes)}")
        return outputs

    def forward(self, batch: Tensor) -> Tensor:
        outputs = self.member_outputs(batch)
        if self.combine is CombineMode.HARD_VOTE:
            outputs = [_one_hot_argmax(o) for o in outputs]
        return np.mean(np.stack(outputs), axis=0)

    def predict(self, sample: Tensor) -> Tensor:
        return self.forward(np.asarray(sample, dtype=np.float64)[None, ...])[0]


def _one_hot_argmax(output: Tensor) -> Tensor:
    flat = output.reshape(output.shape[0], -1)
    votes = np.zeros_like(flat)
    votes[np.arange(flat.shape[0]), flat.argmax(axis=1)] = 1.0
    return votes.reshape(output.shape)
