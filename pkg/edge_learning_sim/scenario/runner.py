"""Assemble a scenario into a simulation, run it and summarize the run."""

import time
from dataclasses import dataclass, field
from ipaddress import IPv4Address
from pathlib import Path
from typing import Dict, List, Optional, Union

from ..apps.aggregator import EnsembleAggregatorApp
from ..apps.generator import DataGeneratorApp
from ..apps.sources import build_source
from ..apps.training import TrainingApp
from ..core.config import get_settings
from ..core.engine import RunStats, Simulator
from ..core.exceptions import EdgeSimError
from ..core.logging import get_logger
from ..core.trace import Trace, TraceKind
from ..learning.dataset import Split
from ..models.data_models import (
    EdgeMetrics,
    EnsembleMetrics,
    MetricsSummary,
    NodeRole,
    PacketMetrics,
    ScenarioConfig,
)
from ..network.application import Application
from ..network.packet import PacketKind
from ..network.topology import Network

logger = get_logger(__name__)

PathLike = Union[str, Path]


@dataclass
class ScenarioRun:
    """A fully assembled, not yet executed, scenario."""

    config: ScenarioConfig
    sim: Simulator
    network: Network
    aggregator: Optional[EnsembleAggregatorApp] = None
    trainers: Dict[int, TrainingApp] = field(default_factory=dict)
    generators: Dict[int, DataGeneratorApp] = field(default_factory=dict)

    @property
    def trace(self) -> Trace:
        return self.sim.trace

    def run(self) -> MetricsSummary:
        started = time.perf_counter()
        try:
            stats = self.sim.run_until(self.config.stop_at_ns)
        finally:
            self.trace.close()
        summary = collect_metrics(self, stats)
        summary.wall_clock_seconds = time.perf_counter() - started
        logger.info(
            f"Run finished at t={stats.final_time} ns: {stats.events_executed} events, "
            f"{summary.packets.sent} packets sent in {summary.wall_clock_seconds:.2f}s"
        )
        return summary


def build_scenario(config: ScenarioConfig, trace: Optional[Trace] = None) -> ScenarioRun:
    """Create nodes, devices, protocol stacks, endpoints and applications, in that order."""
    sim = Simulator(seed=config.seed, trace=trace)
    network = Network(sim)
    nodes = sorted(config.nodes, key=lambda n: n.id)

    # 1. nodes
    network.create_nodes(len(nodes))
    # 2. network devices and channels
    for link in config.links:
        network.connect_p2p(link.a, link.b, link.rate_bps, link.delay_ns, link.queue_capacity)
    # 3. protocol stacks
    network.install_stack()
    # 4. senders and receivers
    address: Dict[int, IPv4Address] = {}
    for node in nodes:
        assigned = network.node(node.id).address
        assert assigned is not None
        address[node.id] = assigned
        if node.role is NodeRole.EDGE:
            assert node.cache_capacity is not None
            network.node(node.id).enable_cache(node.cache_capacity)
    center = config.center

    # 5. applications
    scenario = ScenarioRun(config=config, sim=sim, network=network)
    stop_at = config.stop_at_ns
    dataset = config.dataset
    source = build_source(dataset)
    edges = config.nodes_with_role(NodeRole.EDGE)

    evaluation = None
    if dataset.evaluation_samples > 0:
        evaluation = source.dataset(sim.rng_stream("data/evaluation"), dataset.evaluation_samples, Split.TEST)

    def install(node_id: int, app: Application, start_at: int) -> bool:
        if start_at >= stop_at:
            logger.warning(f"{type(app).__name__} on node {node_id} starts at {start_at} ns, after the run ends")
            return False
        network.install_application(node_id, app, start_at, stop_at)
        return True

    aggregator = EnsembleAggregatorApp(len(edges), config.aggregator.combine, evaluation)
    if install(center.id, aggregator, config.aggregator.start_ns):
        scenario.aggregator = aggregator

    training = config.training
    reply_timeout = training.reply_timeout_ns or get_settings().default_reply_timeout_ns
    spec = training.network_spec(dataset.features, dataset.classes)
    for node in edges:
        trainer = TrainingApp(
            network_spec=spec,
            strategy=training.strategy(),
            sufficiency_threshold=training.sufficiency_threshold,
            center_address=address[center.id],
            neighbor_addresses=[address[peer] for peer in node.neighbors],
            compute_ns_per_sample_epoch=training.compute_ns_per_sample_epoch,
            reply_timeout_ns=reply_timeout,
            sufficiency_deadline_ns=training.sufficiency_deadline_ns,
        )
        if install(node.id, trainer, training.start_ns):
            scenario.trainers[node.id] = trainer

    generator = config.generator
    for node in config.nodes_with_role(NodeRole.TERMINAL):
        assert node.target is not None
        app = DataGeneratorApp(
            target_address=address[node.target],
            samples_to_send=node.samples_to_send if node.samples_to_send is not None else generator.samples_to_send,
            inter_send_gap_ns=generator.inter_send_gap_ns,
            source=source,
        )
        if install(node.id, app, generator.start_ns):
            scenario.generators[node.id] = app

    logger.info(
        f"Scenario assembled: {len(nodes)} nodes, {len(config.links)} links, "
        f"{len(scenario.trainers)} trainers, {len(scenario.generators)} generators"
    )
    return scenario


def collect_metrics(scenario: ScenarioRun, stats: RunStats) -> MetricsSummary:
    """Counters of a finished run; each one matches its trace kind count."""
    network = scenario.network
    trace = scenario.trace
    counters = network.counters
    packets = PacketMetrics(
        sent=counters.sent,
        delivered=counters.delivered,
        dropped_queue=counters.dropped_queue,
        dropped_no_route=counters.dropped_no_route,
        dropped_app_stopped=counters.dropped_app_stopped,
        in_flight=len(network.in_flight),
    )
    if not packets.conserved:
        logger.error(f"Packet conservation violated: {packets}")

    center_id = scenario.config.center.id
    model_results = sum(
        1
        for record in trace.of_kind(TraceKind.PACKET_DELIVER)
        if record.node == center_id and record.detail.get("kind") == PacketKind.MODEL_RESULT.value
    )

    edges: List[EdgeMetrics] = []
    for node_id, app in scenario.trainers.items():
        cache = network.node(node_id).cache
        assert cache is not None
        report = app.report
        edges.append(
            EdgeMetrics(
                node=node_id,
                cache_len=len(cache),
                cache_hits=cache.hits,
                cache_misses=cache.misses,
                cache_evictions=cache.evictions,
                data_requests=app.requests_sent,
                fallback=app.fallback,
                training_samples=report.samples if report is not None else 0,
                epochs_run=report.epochs_run if report is not None else 0,
                final_loss=report.final_loss if report is not None else None,
                training_duration_ns=app.training_duration_ns,
                result_sent=app.result_sent,
            )
        )

    ensemble = EnsembleMetrics(combine=scenario.config.aggregator.combine)
    aggregator = scenario.aggregator
    if aggregator is not None:
        ensemble.submodels = len(aggregator.received)
        ensemble.ready = aggregator.aggregated
        ensemble.accuracy = {label: report.accuracy for label, report in aggregator.evaluations.items()}

    return MetricsSummary(
        seed=scenario.config.seed,
        stop_at_ns=scenario.config.stop_at_ns,
        final_time_ns=stats.final_time,
        events_executed=stats.events_executed,
        packets=packets,
        model_results_delivered=model_results,
        edges=edges,
        ensemble=ensemble,
    )


def write_metrics(summary: MetricsSummary, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(summary.to_lines()) + "\n", encoding="utf-8")
    except OSError as e:
        raise EdgeSimError(f"Cannot write metrics file: {e}", details=str(path)) from e
    logger.debug(f"Metrics written: {path}")
    return path


def run_scenario(
    config: ScenarioConfig,
    trace_path: Optional[PathLike] = None,
    metrics_path: Optional[PathLike] = None,
) -> MetricsSummary:
    """Build and run ``config``; write the trace and metrics files when paths are given."""
    trace = Trace(Path(trace_path) if trace_path is not None else None)
    try:
        scenario = build_scenario(config, trace)
    except Exception:
        trace.close()
        raise
    summary = scenario.run()
    if metrics_path is not None:
        write_metrics(summary, metrics_path)
    return summary
