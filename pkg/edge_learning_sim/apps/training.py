"""Edge training application.

Flow after start: cache incoming samples, check sufficiency, ask neighbors
for cached data when short, train a sub-model once, upload it to the center.
"""

import enum
from ipaddress import IPv4Address
from typing import List, Optional, Sequence

import numpy as np

from ..core.exceptions import InvalidArgumentError, NoRouteError, PayloadError
from ..core.logging import get_logger
from ..core.trace import TraceKind
from ..learning.builders import NetworkSpec
from ..learning.dataset import DataSet
from ..learning.network import NeuralNetwork
from ..learning.training import TrainingReport, TrainingStrategy, train
from ..network.application import Application
from ..network.packet import Packet, PacketKind
from .payloads import (
    ControlCode,
    Sample,
    decode_control,
    decode_request,
    decode_sample,
    encode_control,
    encode_model_result,
    encode_request,
)

logger = get_logger(__name__)


class Sufficiency(str, enum.Enum):
    SUFFICIENT = "SUFFICIENT"
    INSUFFICIENT = "INSUFFICIENT"


class TrainingApp(Application):
    """Trains one sub-model from the node's LRU cache and reports it.

    Neighbor requests start once the collection window
    (``sufficiency_deadline_ns`` after start) has closed; reaching the
    threshold earlier starts training right away. Neighbors are asked one at
    a time, in list order. Nothing is checked at start: with a zero window the
    first received sample runs the sufficiency check.
    """

    kind = "training"

    def __init__(
        self,
        network_spec: NetworkSpec,
        strategy: TrainingStrategy,
        sufficiency_threshold: int,
        center_address: IPv4Address,
        neighbor_addresses: Sequence[IPv4Address] = (),
        compute_ns_per_sample_epoch: int = 0,
        reply_timeout_ns: int = 100_000_000,
        sufficiency_deadline_ns: int = 0,
    ):
        super().__init__()
        if sufficiency_threshold < 1:
            raise InvalidArgumentError(f"sufficiency_threshold must be >= 1, got {sufficiency_threshold}")
        if compute_ns_per_sample_epoch < 0:
            raise InvalidArgumentError("compute_ns_per_sample_epoch must be >= 0")
        if reply_timeout_ns <= 0:
            raise InvalidArgumentError(f"reply_timeout_ns must be > 0, got {reply_timeout_ns}")
        if sufficiency_deadline_ns < 0:
            raise InvalidArgumentError("sufficiency_deadline_ns must be >= 0")
        self.network_spec = network_spec
        self.strategy = strategy
        self.sufficiency_threshold = sufficiency_threshold
        self.center_address = IPv4Address(center_address)
        self.neighbor_addresses: List[IPv4Address] = [IPv4Address(a) for a in neighbor_addresses]
        self.compute_ns_per_sample_epoch = compute_ns_per_sample_epoch
        self.reply_timeout_ns = reply_timeout_ns
        self.sufficiency_deadline_ns = sufficiency_deadline_ns

        self.window_closed = False
        self.request_outstanding = False
        self.requests_sent = 0
        self.fallback = False
        self.training_started = False
        self.result_sent = False
        self.model: Optional[NeuralNetwork] = None
        self.report: Optional[TrainingReport] = None
        self.training_duration_ns = 0
        self._next_neighbor = 0
        self._awaiting: Optional[IPv4Address] = None
        self._timeout_event: Optional[int] = None
        self._window_event: Optional[int] = None
        self._done_event: Optional[int] = None
        self.on_receive(self.training_on_receive)

    @property
    def cache_len(self) -> int:
        cache = self.node.cache
        return len(cache) if cache is not None else 0

    # lifecycle

    def on_start(self) -> None:
        if self.node.cache is None:
            raise InvalidArgumentError(f"TrainingApp on node {self.node.id} needs caching enabled")
        if self.sufficiency_deadline_ns == 0:
            self.window_closed = True
        else:
            self._window_event = self.sim.schedule(self.sufficiency_deadline_ns, self._close_window)

    def on_stop(self) -> None:
        for event_id in (self._window_event, self._timeout_event, self._done_event):
            if event_id is not None:
                self.sim.cancel(event_id)
        self._window_event = self._timeout_event = self._done_event = None

    def _close_window(self) -> None:
        self._window_event = None
        self.window_closed = True
        self.check_sufficiency()

    # receive path

    def training_on_receive(self, packet: Packet, arrival: int) -> None:
        try:
            if packet.kind is PacketKind.DATA_SAMPLE:
                self._on_sample(packet)
            elif packet.kind is PacketKind.DATA_REQUEST:
                self._on_request(packet, decode_request(packet.payload))
            elif packet.kind is PacketKind.CONTROL:
                code, count = decode_control(packet.payload)
                if code is ControlCode.REPLY_END:
                    self._on_reply_end(packet.src, count)
            else:
                logger.debug(f"Node {self.node.id} ignores {packet.kind.value} packet {packet.id}")
        except PayloadError as e:
            self.sim.emit(
                TraceKind.MALFORMED_PACKET,
                node=self.node.id,
                packet=packet.id,
                kind=packet.kind.value,
                reason=e.message,
            )

    def _on_sample(self, packet: Packet) -> None:
        sample = decode_sample(packet.payload)
        if sample.inputs.size != self.network_spec.inputs or sample.targets.size != self.network_spec.outputs:
            raise PayloadError(
                f"sample has {sample.inputs.size} inputs and {sample.targets.size} targets, "
                f"model expects {self.network_spec.inputs} and {self.network_spec.outputs}"
            )
        self.node.cache_put(sample.sample_id, packet.payload)
        self.check_sufficiency()

    def _on_request(self, packet: Packet, count: int) -> None:
        cache = self.node.cache
        assert cache is not None
        replies = [payload for _, payload in cache.items_mru()][:count]
        try:
            for payload in replies:
                self.send(packet.src, PacketKind.DATA_SAMPLE, payload)
            self.send(packet.src, PacketKind.CONTROL, encode_control(ControlCode.REPLY_END, len(replies)))
        except NoRouteError as e:
            logger.warning(f"Node {self.node.id} cannot answer {packet.src}: {e.message}")
            return
        logger.debug(f"Node {self.node.id} answered a request for {count} with {len(replies)} samples")

    def _on_reply_end(self, sender: IPv4Address, count: int) -> None:
        if not self.request_outstanding or sender != self._awaiting:
            return
        self._clear_request()
        logger.debug(f"Node {self.node.id}: {sender} finished replying with {count} samples")
        if not self.training_started:
            self.check_sufficiency()

    def _on_reply_timeout(self) -> None:
        self._timeout_event = None
        logger.debug(f"Node {self.node.id}: reply timeout from {self._awaiting}")
        self._clear_request()
        if not self.training_started:
            self.check_sufficiency()

    def _clear_request(self) -> None:
        if self._timeout_event is not None:
            self.sim.cancel(self._timeout_event)
            self._timeout_event = None
        self.request_outstanding = False
        self._awaiting = None

    # sufficiency and neighbor requests

    def check_sufficiency(self) -> Sufficiency:
        if self.cache_len >= self.sufficiency_threshold:
            if not self.training_started:
                self.train_submodel()
            return Sufficiency.SUFFICIENT
        if self.window_closed and not self.request_outstanding and not self.training_started:
            self.request_neighbor_data()
        return Sufficiency.INSUFFICIENT

    def request_neighbor_data(self) -> None:
        """Ask the next neighbor for the deficit, or fall back to local data."""
        while self._next_neighbor < len(self.neighbor_addresses):
            neighbor = self.neighbor_addresses[self._next_neighbor]
            self._next_neighbor += 1
            deficit = self.sufficiency_threshold - self.cache_len
            try:
                self.send(neighbor, PacketKind.DATA_REQUEST, encode_request(deficit))
            except NoRouteError as e:
                logger.warning(f"Node {self.node.id} skips neighbor {neighbor}: {e.message}")
                continue
            self.requests_sent += 1
            self.sim.emit(TraceKind.DATA_REQUEST, node=self.node.id, neighbor=str(neighbor), count=deficit)
            self.request_outstanding = True
            self._awaiting = neighbor
            self._timeout_event = self.sim.schedule(self.reply_timeout_ns, self._on_reply_timeout)
            return

        self.fallback = True
        self.sim.emit(
            TraceKind.INSUFFICIENT_FALLBACK,
            node=self.node.id,
            cached=self.cache_len,
            threshold=self.sufficiency_threshold,
        )
        self.train_submodel()

    # training

    def cached_dataset(self) -> Optional[DataSet]:
        """All cached samples as TRAIN rows, least recently used first.

        Read-only: cache order and hit counters are left unchanged.
        """
        cache = self.node.cache
        assert cache is not None
        samples: List[Sample] = []
        for key in cache.keys_lru():
            payload = cache.peek(key)
            assert isinstance(payload, bytes)
            samples.append(decode_sample(payload))
        if not samples:
            return None
        return DataSet.from_arrays(
            np.stack([s.inputs for s in samples]),
            np.stack([s.targets for s in samples]),
        )

    def train_submodel(self) -> None:
        if self.training_started:
            return
        self.training_started = True
        self._clear_request()
        if self._window_event is not None:
            self.sim.cancel(self._window_event)
            self._window_event = None

        dataset = self.cached_dataset()
        if dataset is None:
            self.sim.emit(TraceKind.TRAIN_SKIPPED_EMPTY, node=self.node.id)
            logger.warning(f"Node {self.node.id} has no cached data; training skipped")
            return
        self.sim.emit(TraceKind.TRAINING_START, node=self.node.id, samples=len(dataset))

        mean, std = dataset.input_statistics(split=None)
        self.model = self.network_spec.build(self.sim.rng_stream(f"model/node{self.node.id}"), mean, std)
        self.report = train(self.model, dataset, self.strategy)
        self.training_duration_ns = self.compute_ns_per_sample_epoch * len(dataset) * self.report.epochs_run
        logger.info(
            f"Node {self.node.id} trained on {len(dataset)} samples: "
            f"{self.report.epochs_run} epochs, loss {self.report.final_loss:.4g}"
        )
        self._done_event = self.sim.schedule(self.training_duration_ns, self._training_done)

    def _training_done(self) -> None:
        self._done_event = None
        assert self.report is not None
        self.sim.emit(
            TraceKind.TRAINING_DONE,
            node=self.node.id,
            samples=self.report.samples,
            epochs=self.report.epochs_run,
            loss=self.report.final_loss,
            stop_reason=self.report.stop_reason.value,
            digest=self.report.final_parameters_digest,
            duration_ns=self.training_duration_ns,
        )
        self.send_results_to_center()

    def send_results_to_center(self) -> None:
        if self.model is None or self.report is None:
            raise InvalidArgumentError(f"Node {self.node.id} has no trained model to send")
        summary = {
            "node": self.node.id,
            "samples": self.report.samples,
            "epochs_run": self.report.epochs_run,
            "final_loss": self.report.final_loss,
            "stop_reason": self.report.stop_reason.value,
            "digest": self.report.final_parameters_digest,
        }
        try:
            packet_id = self.send(
                self.center_address, PacketKind.MODEL_RESULT, encode_model_result(self.model, summary)
            )
        except NoRouteError as e:
            logger.error(f"Node {self.node.id} cannot reach the center: {e.message}")
            return
        self.result_sent = True
        self.sim.emit(
            TraceKind.MODEL_RESULT_SENT,
            node=self.node.id,
            packet=packet_id,
            digest=self.report.final_parameters_digest,
        )
