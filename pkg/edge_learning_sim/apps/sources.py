"""Labeled-sample sources for data generators."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Tuple

import numpy as np

from ..core.exceptions import ConfigurationError, InvalidArgumentError
from ..core.logging import get_logger
from ..core.rng import RandomStream
from ..learning.dataset import DataSet, Split
from ..learning.tensor import Tensor
from ..models.data_models import DatasetKind, DatasetSpec

logger = get_logger(__name__)


def one_hot(label: int, classes: int) -> Tensor:
    target = np.zeros(classes)
    target[label] = 1.0
    return target


class SampleSource(ABC):
    """Draws (inputs, one-hot target) rows from a random stream."""

    def __init__(self, features: int, classes: int):
        self.features = features
        self.classes = classes

    @abstractmethod
    def sample(self, stream: RandomStream) -> Tuple[Tensor, Tensor]:
        """Draw one labeled row."""

    def dataset(self, stream: RandomStream, rows: int, split: Split = Split.TEST) -> DataSet:
        """``rows`` draws collected into a data set with one split tag."""
        if rows < 1:
            raise InvalidArgumentError(f"Row count must be >= 1, got {rows}")
        drawn = [self.sample(stream) for _ in range(rows)]
        return DataSet.from_arrays(
            np.stack([x for x, _ in drawn]),
            np.stack([t for _, t in drawn]),
            split=split,
        )


class TwoGaussians(SampleSource):
    """Isotropic gaussian blobs, one per class, centred along the diagonal.

    With two classes the centres sit at -separation/2 and +separation/2 on
    every feature.
    """

    def __init__(self, features: int = 2, classes: int = 2, separation: float = 2.0, spread: float = 1.0):
        super().__init__(features, classes)
        self.separation = separation
        self.spread = spread

    def sample(self, stream: RandomStream) -> Tuple[Tensor, Tensor]:
        label = stream.randbelow(self.classes)
        centre = self.separation * (label - (self.classes - 1) / 2)
        inputs = np.array([stream.gauss(centre, self.spread) for _ in range(self.features)])
        return inputs, one_hot(label, self.classes)


class Xor(SampleSource):
    """Points in [-1, 1]^2 labeled by the sign agreement of their coordinates."""

    def __init__(self, noise: float = 0.1):
        super().__init__(features=2, classes=2)
        self.noise = noise

    def sample(self, stream: RandomStream) -> Tuple[Tensor, Tensor]:
        x = stream.uniform(-1.0, 1.0)
        y = stream.uniform(-1.0, 1.0)
        label = int((x > 0) != (y > 0))
        if self.noise > 0:
            x += stream.gauss(0.0, self.noise)
            y += stream.gauss(0.0, self.noise)
        return np.array([x, y]), one_hot(label, 2)


class CsvFile(SampleSource):
    """Rows of a CSV file (features, then an integer class label), drawn with replacement."""

    def __init__(self, path: Path, classes: int):
        try:
            table = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"Cannot read dataset file {path}: {e}", details=str(path)) from e
        if table.shape[0] == 0 or table.shape[1] < 2:
            raise ConfigurationError(f"Dataset file {path} needs at least one feature and a label column")
        labels = table[:, -1]
        if np.any(labels != np.round(labels)) or labels.min() < 0 or labels.max() >= classes:
            raise ConfigurationError(f"Labels in {path} must be integers in [0, {classes})")
        super().__init__(features=table.shape[1] - 1, classes=classes)
        self.path = Path(path)
        self.inputs = table[:, :-1]
        self.labels = labels.astype(np.int64)
        logger.debug(f"Loaded {table.shape[0]} rows from {path}")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def sample(self, stream: RandomStream) -> Tuple[Tensor, Tensor]:
        row = stream.randbelow(len(self))
        return self.inputs[row].copy(), one_hot(int(self.labels[row]), self.classes)


def build_source(spec: DatasetSpec) -> SampleSource:
    if spec.kind is DatasetKind.XOR:
        return Xor(noise=spec.noise)
    if spec.kind is DatasetKind.FILE:
        assert spec.path is not None
        source = CsvFile(spec.path, spec.classes)
        if source.features != spec.features:
            raise ConfigurationError(
                f"Dataset file {spec.path} has {source.features} features, scenario declares {spec.features}"
            )
        return source
    return TwoGaussians(spec.features, spec.classes, spec.separation, spec.spread)
