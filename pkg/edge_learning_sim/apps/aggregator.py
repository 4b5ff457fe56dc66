"""Data-center application that ensembles the uploaded sub-models."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from ..core.exceptions import InvalidArgumentError, PayloadError
from ..core.logging import get_logger
from ..core.trace import TraceKind
from ..learning.dataset import DataSet, Split
from ..learning.ensemble import CombineMode, EnsembleModel
from ..learning.network import NeuralNetwork
from ..learning.serialization import parameters_digest
from ..learning.testing import TestingReport, evaluate
from ..network.application import Application
from ..network.packet import Packet, PacketKind
from .payloads import decode_model_result

logger = get_logger(__name__)

ENSEMBLE_LABEL = "ensemble"


@dataclass
class SubModel:
    sender: str
    network: NeuralNetwork
    digest: str
    summary: Dict[str, Any]
    received_at: int


class EnsembleAggregatorApp(Application):
    """Collects one MODEL_RESULT per edge node and ensembles them once.

    A second result from the same sender before completion replaces the first.
    Results arriving after aggregation are ignored.
    """

    kind = "aggregator"

    def __init__(
        self,
        expected_submodels: int,
        combine: CombineMode = CombineMode.SOFT_VOTE,
        evaluation: Optional[DataSet] = None,
    ):
        super().__init__()
        if expected_submodels < 1:
            raise InvalidArgumentError(f"expected_submodels must be >= 1, got {expected_submodels}")
        self.expected_submodels = expected_submodels
        self.combine = CombineMode(combine)
        self.evaluation = evaluation
        self.received: Dict[str, SubModel] = {}
        self.ensemble: Optional[EnsembleModel] = None
        self.evaluations: Dict[str, TestingReport] = {}
        self.on_receive(self._on_packet)

    @property
    def aggregated(self) -> bool:
        return self.ensemble is not None

    def _on_packet(self, packet: Packet, arrival: int) -> None:
        if packet.kind is not PacketKind.MODEL_RESULT:
            logger.debug(f"Aggregator ignores {packet.kind.value} packet {packet.id}")
            return
        try:
            summary, network = decode_model_result(packet.payload)
        except PayloadError as e:
            self.sim.emit(
                TraceKind.MALFORMED_PACKET,
                node=self.node.id,
                packet=packet.id,
                kind=packet.kind.value,
                reason=e.message,
            )
            return
        if self.aggregated:
            logger.info(f"Late MODEL_RESULT from {packet.src} ignored; ensemble already built")
            return

        sender = str(packet.src)
        digest = parameters_digest(network)
        if sender in self.received:
            self.sim.emit(
                TraceKind.DUPLICATE_RESULT,
                node=self.node.id,
                sender=sender,
                replaced=self.received[sender].digest,
                digest=digest,
            )
        self.received[sender] = SubModel(sender, network, digest, summary, arrival)
        logger.debug(f"Aggregator holds {len(self.received)}/{self.expected_submodels} sub-models")
        if len(self.received) == self.expected_submodels:
            self.aggregate()

    def aggregate(self) -> EnsembleModel:
        if self.aggregated:
            raise InvalidArgumentError("Aggregation already happened")
        if len(self.received) != self.expected_submodels:
            raise InvalidArgumentError(
                f"Aggregation needs {self.expected_submodels} sub-models, holding {len(self.received)}"
            )
        members = list(self.received.values())
        self.ensemble = EnsembleModel([m.network for m in members], self.combine)
        self.sim.emit(
            TraceKind.ENSEMBLE_READY,
            node=self.node.id,
            submodels=len(members),
            combine=self.combine.value,
            digests=",".join(m.digest for m in members),
        )
        logger.info(f"Ensemble of {len(members)} sub-models ready at t={self.now} ns")
        if self.evaluation is not None:
            self._evaluate(members)
        return self.ensemble

    def _evaluate(self, members: List[SubModel]) -> None:
        assert self.evaluation is not None and self.ensemble is not None
        candidates: List[Any] = [(m.sender, m.network) for m in members]
        candidates.append((ENSEMBLE_LABEL, self.ensemble))
        for label, model in candidates:
            report = evaluate(model, self.evaluation, split=Split.TEST)
            self.evaluations[label] = report
            self.sim.emit(
                TraceKind.MODEL_EVALUATION,
                node=self.node.id,
                model=label,
                rows=report.rows,
                loss=report.loss,
                accuracy=report.accuracy,
            )
