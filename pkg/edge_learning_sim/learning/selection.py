"""Model selection: train candidates and keep the best on validation data."""

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Union

from pydantic import BaseModel

from ..core.exceptions import InvalidArgumentError
from ..core.logging import get_logger
from ..core.rng import RandomStream
from .builders import NetworkSpec
from .dataset import DataSet, Split
from .network import NeuralNetwork
from .testing import evaluate
from .training import TrainingReport, TrainingStrategy, train

logger = get_logger(__name__)

INIT_STREAM = "model/init"


@dataclass
class Candidate:
    """A network (or its spec) plus an optional input-column selection."""

    network: Union[NetworkSpec, NeuralNetwork]
    input_columns: Optional[Sequence[int]] = None


class CandidateResult(BaseModel):
    index: int
    training: TrainingReport
    validation_loss: float


class SelectionResult(BaseModel):
    best_index: int
    candidates: List[CandidateResult]

    @property
    def best(self) -> CandidateResult:
        return self.candidates[self.best_index]


def select_model(
    candidates: Sequence[Union[Candidate, NetworkSpec, NeuralNetwork]],
    dataset: DataSet,
    strategy: TrainingStrategy,
) -> SelectionResult:
    """Train every candidate and pick the lowest validation loss (ties to the lowest index).

    Specs are built and initialized from a stream seeded with
    ``strategy.seed + index``; ready-made networks are trained as given.
    """
    if not candidates:
        raise InvalidArgumentError("Model selection needs at least one candidate")
    if dataset.count(Split.VALIDATION) == 0:
        raise InvalidArgumentError("Model selection needs VALIDATION rows")

    results: List[CandidateResult] = []
    for index, raw in enumerate(candidates):
        candidate = raw if isinstance(raw, Candidate) else Candidate(raw)
        data = dataset.with_inputs(candidate.input_columns) if candidate.input_columns else dataset
        if isinstance(candidate.network, NetworkSpec):
            stream = RandomStream(INIT_STREAM, strategy.seed + index)
            mean, std = data.input_statistics(Split.TRAIN)
            net = candidate.network.build(stream, mean=mean, std=std)
        else:
            net = candidate.network
        report = train(net, data, strategy)
        validation = evaluate(net, data, index=strategy.loss, split=Split.VALIDATION)
        logger.debug(f"candidate {index}: validation loss {validation.loss:.6g}")
        results.append(CandidateResult(index=index, training=report, validation_loss=validation.loss))

    best = min(range(len(results)), key=lambda i: (results[i].validation_loss, i))
    return SelectionResult(best_index=best, candidates=results)


def input_subsets(columns: Sequence[int], size: int) -> List[List[int]]:
    """Every input-column subset of ``size``, for input selection."""
    if not 1 <= size <= len(columns):
        raise InvalidArgumentError(f"Subset size {size} outside 1..{len(columns)}")
    return [list(c) for c in combinations(columns, size)]
