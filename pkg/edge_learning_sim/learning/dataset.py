"""Data sets: a sample matrix with input/target columns and split tags."""

import enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import InvalidArgumentError, ShapeError
from ..core.rng import RandomStream
from .tensor import Tensor, as_tensor


class Split(str, enum.Enum):
    TRAIN = "TRAIN"
    VALIDATION = "VALIDATION"
    TEST = "TEST"


class DataSet:
    """Samples (rows) with disjoint input and target column sets.

    Every row carries exactly one :class:`Split` tag.
    """

    def __init__(
        self,
        samples: Tensor,
        input_columns: Sequence[int],
        target_columns: Sequence[int],
        splits: Optional[Sequence[Union[Split, str]]] = None,
    ):
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ShapeError(f"Samples must be a matrix, got shape {samples.shape}")
        self.samples = samples
        self.input_columns: Tuple[int, ...] = tuple(int(c) for c in input_columns)
        self.target_columns: Tuple[int, ...] = tuple(int(c) for c in target_columns)
        if not self.input_columns or not self.target_columns:
            raise InvalidArgumentError("A data set needs at least one input and one target column")
        if set(self.input_columns) & set(self.target_columns):
            raise InvalidArgumentError("Input and target columns must be disjoint")
        for column in self.input_columns + self.target_columns:
            if not 0 <= column < samples.shape[1]:
                raise InvalidArgumentError(f"Column {column} out of range for {samples.shape[1]} columns")
        if splits is None:
            self.splits: List[Split] = [Split.TRAIN] * samples.shape[0]
        else:
            self.splits = [Split(s) for s in splits]
            if len(self.splits) != samples.shape[0]:
                raise InvalidArgumentError(
                    f"{len(self.splits)} split tags for {samples.shape[0]} rows"
                )

    @classmethod
    def from_arrays(
        cls,
        inputs: Tensor,
        targets: Tensor,
        split: Union[Split, str, Sequence[Union[Split, str]]] = Split.TRAIN,
    ) -> "DataSet":
        inputs = as_tensor(inputs)
        targets = as_tensor(targets)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, 1)
        if targets.ndim == 1:
            targets = targets.reshape(-1, 1)
        inputs = inputs.reshape(inputs.shape[0], -1)
        targets = targets.reshape(targets.shape[0], -1)
        if inputs.shape[0] != targets.shape[0]:
            raise ShapeError(f"{inputs.shape[0]} input rows vs {targets.shape[0]} target rows")
        n_in, n_out = inputs.shape[1], targets.shape[1]
        splits = [split] * inputs.shape[0] if isinstance(split, (Split, str)) else list(split)
        return cls(
            np.hstack([inputs, targets]),
            input_columns=range(n_in),
            target_columns=range(n_in, n_in + n_out),
            splits=splits,
        )

    @classmethod
    def concatenate(cls, parts: Sequence["DataSet"]) -> "DataSet":
        if not parts:
            raise InvalidArgumentError("Nothing to concatenate")
        first = parts[0]
        for part in parts[1:]:
            if (part.input_columns, part.target_columns) != (first.input_columns, first.target_columns):
                raise ShapeError("Data sets have different column layouts")
        return cls(
            np.vstack([p.samples for p in parts]),
            first.input_columns,
            first.target_columns,
            [s for p in parts for s in p.splits],
        )

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __repr__(self) -> str:
        counts = {s.value: self.count(s) for s in Split}
        return (
            f"DataSet(rows={len(self)}, inputs={len(self.input_columns)}, "
            f"targets={len(self.target_columns)}, splits={counts})"
        )

    @property
    def input_count(self) -> int:
        return len(self.input_columns)

    @property
    def target_count(self) -> int:
        return len(self.target_columns)

    def _mask(self, split: Optional[Split]) -> np.ndarray:
        if split is None:
            return np.ones(len(self), dtype=bool)
        split = Split(split)
        return np.array([s is split for s in self.splits], dtype=bool)

    def count(self, split: Optional[Split] = None) -> int:
        return int(self._mask(split).sum())

    def inputs(self, split: Optional[Split] = None) -> Tensor:
        return self.samples[self._mask(split)][:, list(self.input_columns)]

    def targets(self, split: Optional[Split] = None) -> Tensor:
        return self.samples[self._mask(split)][:, list(self.target_columns)]

    def with_inputs(self, columns: Sequence[int]) -> "DataSet":
        """Same rows and targets with a different input column selection."""
        return DataSet(self.samples, columns, self.target_columns, self.splits)

    def with_splits(self, splits: Sequence[Union[Split, str]]) -> "DataSet":
        return DataSet(self.samples, self.input_columns, self.target_columns, splits)

    def split_random(
        self,
        stream: RandomStream,
        train: float = 0.6,
        validation: float = 0.2,
    ) -> "DataSet":
        """Shuffle row order with ``stream`` and tag TRAIN/VALIDATION/TEST by fraction."""
        if train < 0 or validation < 0 or train + validation > 1:
            raise InvalidArgumentError(f"Invalid split fractions: train={train}, validation={validation}")
        order = list(range(len(self)))
        stream.shuffle(order)
        n_train = int(round(train * len(self)))
        n_val = int(round(validation * len(self)))
        splits = [Split.TEST] * len(self)
        for rank, row in enumerate(order):
            if rank < n_train:
                splits[row] = Split.TRAIN
            elif rank < n_train + n_val:
                splits[row] = Split.VALIDATION
        return self.with_splits(splits)

    def input_statistics(self, split: Optional[Split] = Split.TRAIN) -> Tuple[Tensor, Tensor]:
        """Per-input mean and standard deviation; zero deviations become 1."""
        data = self.inputs(split)
        if data.shape[0] == 0:
            raise InvalidArgumentError(f"No {split} rows to compute statistics from")
        mean = data.mean(axis=0)
        std = data.std(axis=0)
        std[std == 0] = 1.0
        return mean, std
