"""Data models for scenarios and run metrics."""

import enum
from collections import Counter
from pathlib import Path
from typing import Dict, List, Literal, NamedTuple, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from ..core.config import NANOSECONDS_PER_SECOND
from ..core.rng import MASK64
from ..learning.builders import NetworkSpec
from ..learning.ensemble import CombineMode
from ..learning.losses import LossIndex
from ..learning.optimizers import SgdOptimizer
from ..learning.training import TrainingStrategy


class NodeRole(str, enum.Enum):
    TERMINAL = "TERMINAL"
    EDGE = "EDGE"
    GATEWAY = "GATEWAY"
    DATA_CENTER = "DATA_CENTER"


class DatasetKind(str, enum.Enum):
    TWO_GAUSSIANS = "two_gaussians"
    XOR = "xor"
    FILE = "file"


class DatasetSpec(BaseModel):
    """Labeled-sample source shared by every terminal."""

    kind: DatasetKind = Field(default=DatasetKind.TWO_GAUSSIANS, description="Sample distribution")
    features: int = Field(default=2, ge=1, description="Input features per sample")
    classes: int = Field(default=2, ge=2, description="Number of classes (one-hot targets)")
    separation: float = Field(default=2.0, ge=0.0, description="Distance between class centres")
    spread: float = Field(default=1.0, gt=0.0, description="Per-feature standard deviation")
    noise: float = Field(default=0.1, ge=0.0, description="Additive input noise for xor")
    path: Optional[Path] = Field(default=None, description="CSV file: features then an integer label")
    evaluation_samples: int = Field(default=0, ge=0, description="Held-out rows evaluated at the center")

    @model_validator(mode="after")
    def validate_kind(self) -> "DatasetSpec":
        if self.kind is DatasetKind.XOR and (self.features != 2 or self.classes != 2):
            raise ValueError("xor needs features = 2 and classes = 2")
        if self.kind is DatasetKind.FILE and self.path is None:
            raise ValueError("file datasets need a path")
        return self


class NodeConfig(BaseModel):
    id: int = Field(..., ge=0)
    role: NodeRole
    cache_capacity: Optional[int] = Field(default=None, ge=1, description="LRU capacity (EDGE only)")
    target: Optional[int] = Field(default=None, ge=0, description="EDGE node a TERMINAL sends to")
    neighbors: List[int] = Field(default_factory=list, description="EDGE nodes asked for data, in order")
    samples_to_send: Optional[int] = Field(default=None, ge=0, description="Per-terminal override")


class LinkConfig(BaseModel):
    a: int = Field(..., ge=0)
    b: int = Field(..., ge=0)
    rate_bps: int = Field(default=1_000_000_000, gt=0)
    delay_ns: int = Field(default=2_000_000, ge=0)
    queue_capacity: int = Field(default=100, ge=1)


class GeneratorConfig(BaseModel):
    samples_to_send: int = Field(default=50, ge=0)
    inter_send_gap_ns: int = Field(default=1_000_000, ge=0)
    start_ns: int = Field(default=NANOSECONDS_PER_SECOND, ge=0)


class TrainingConfig(BaseModel):
    """Edge training application settings, flat as they appear in scenario files."""

    start_ns: int = Field(default=0, ge=0)
    sufficiency_threshold: int = Field(default=80, ge=1)
    sufficiency_deadline_ns: int = Field(default=2 * NANOSECONDS_PER_SECOND, ge=0)
    reply_timeout_ns: Optional[int] = Field(default=None, gt=0)
    compute_ns_per_sample_epoch: int = Field(default=1000, ge=0)

    architecture: Literal["mlp", "lenet"] = "mlp"
    hidden: List[int] = Field(default_factory=lambda: [8])
    hidden_activation: str = "tanh"
    output_activation: str = "linear"
    probabilistic: bool = True
    scaling: bool = True
    image_height: Optional[int] = Field(default=None, ge=1)
    image_width: Optional[int] = Field(default=None, ge=1)
    channels: int = Field(default=1, ge=1)

    loss: LossIndex = LossIndex.CROSS_ENTROPY
    learning_rate: float = Field(default=0.1, gt=0.0)
    batch_size: int = Field(default=8, ge=1)
    max_epochs: int = Field(default=50, ge=1)
    loss_goal: float = 0.0
    training_seed: int = Field(default=0, ge=0)

    def network_spec(self, inputs: int, outputs: int) -> NetworkSpec:
        return NetworkSpec(
            architecture=self.architecture,
            inputs=inputs,
            outputs=outputs,
            hidden=self.hidden,
            hidden_activation=self.hidden_activation,
            output_activation=self.output_activation,
            probabilistic=self.probabilistic,
            scaling=self.scaling,
            image_height=self.image_height,
            image_width=self.image_width,
            channels=self.channels,
        )

    def strategy(self) -> TrainingStrategy:
        return TrainingStrategy(
            loss=self.loss,
            optimizer=SgdOptimizer(learning_rate=self.learning_rate, batch_size=self.batch_size),
            max_epochs=self.max_epochs,
            loss_goal=self.loss_goal,
            seed=self.training_seed,
        )


class AggregatorConfig(BaseModel):
    start_ns: int = Field(default=0, ge=0)
    combine: CombineMode = CombineMode.SOFT_VOTE


class TopologyIssue(NamedTuple):
    """A cross-section problem: ``section`` is "node" or "link", ``index`` its position."""

    section: str
    index: int
    field: str
    message: str


def topology_issues(nodes: List[NodeConfig], links: List[LinkConfig]) -> List[TopologyIssue]:
    """Role and reference checks spanning several nodes or links."""
    issues: List[TopologyIssue] = []
    ids = [n.id for n in nodes]
    by_id: Dict[int, NodeConfig] = {}
    for index, node in enumerate(nodes):
        if node.id in by_id:
            issues.append(TopologyIssue("node", index, "id", f"duplicate node id {node.id}"))
        by_id.setdefault(node.id, node)
    if nodes and sorted(set(ids)) != list(range(len(set(ids)))):
        issues.append(
            TopologyIssue("node", len(nodes) - 1, "id", f"node ids must be 0..{len(set(ids)) - 1} without gaps")
        )

    centers = [i for i, n in enumerate(nodes) if n.role is NodeRole.DATA_CENTER]
    if not centers:
        issues.append(TopologyIssue("node", max(len(nodes) - 1, 0), "role", "no DATA_CENTER node declared"))
    elif len(centers) > 1:
        named = ", ".join(str(nodes[i].id) for i in centers)
        issues.append(
            TopologyIssue("node", centers[1], "role", f"exactly one DATA_CENTER allowed, found nodes {named}")
        )
    if not any(n.role is NodeRole.EDGE for n in nodes):
        issues.append(TopologyIssue("node", max(len(nodes) - 1, 0), "role", "no EDGE node declared"))

    for index, node in enumerate(nodes):
        if node.role is NodeRole.TERMINAL:
            if node.target is None:
                issues.append(TopologyIssue("node", index, "target", f"TERMINAL {node.id} needs a target"))
            elif node.target not in by_id:
                issues.append(
                    TopologyIssue("node", index, "target", f"target {node.target} is not a declared node")
                )
            elif by_id[node.target].role is not NodeRole.EDGE:
                role = by_id[node.target].role.value
                issues.append(
                    TopologyIssue("node", index, "target", f"target {node.target} must be an EDGE node, not {role}")
                )
        elif node.target is not None:
            issues.append(TopologyIssue("node", index, "target", "only TERMINAL nodes have a target"))
        elif node.samples_to_send is not None:
            issues.append(TopologyIssue("node", index, "samples_to_send", "only TERMINAL nodes send samples"))

        if node.role is NodeRole.EDGE:
            if node.cache_capacity is None:
                issues.append(TopologyIssue("node", index, "cache_capacity", f"EDGE {node.id} needs a cache_capacity"))
            for peer in node.neighbors:
                if peer == node.id:
                    issues.append(TopologyIssue("node", index, "neighbors", f"node {node.id} lists itself"))
                elif peer not in by_id:
                    issues.append(TopologyIssue("node", index, "neighbors", f"neighbor {peer} is not a declared node"))
                elif by_id[peer].role is not NodeRole.EDGE:
                    issues.append(TopologyIssue("node", index, "neighbors", f"neighbor {peer} is not an EDGE node"))
        elif node.neighbors:
            issues.append(TopologyIssue("node", index, "neighbors", "only EDGE nodes have neighbors"))

    pairs: Counter = Counter()
    for index, link in enumerate(links):
        for end in ("a", "b"):
            endpoint = getattr(link, end)
            if endpoint not in by_id:
                issues.append(TopologyIssue("link", index, end, f"dangling endpoint: node {endpoint} is not declared"))
        if link.a == link.b:
            issues.append(TopologyIssue("link", index, "b", f"link connects node {link.a} to itself"))
        pair = (min(link.a, link.b), max(link.a, link.b))
        pairs[pair] += 1
        if pairs[pair] == 2:
            issues.append(TopologyIssue("link", index, "b", f"nodes {pair[0]} and {pair[1]} are already linked"))
    return issues


class ScenarioConfig(BaseModel):
    """A complete, validated scenario."""

    seed: int = Field(default=42, ge=0, le=MASK64)
    stop_at_ns: int = Field(default=10 * NANOSECONDS_PER_SECOND, gt=0)
    dataset: DatasetSpec = Field(default_factory=DatasetSpec)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    aggregator: AggregatorConfig = Field(default_factory=AggregatorConfig)
    nodes: List[NodeConfig] = Field(..., min_length=1)
    links: List[LinkConfig] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_topology(self) -> "ScenarioConfig":
        issues = topology_issues(self.nodes, self.links)
        if issues:
            raise ValueError("; ".join(f"{i.section} {i.index}: {i.field}: {i.message}" for i in issues))
        return self

    def nodes_with_role(self, role: NodeRole) -> List[NodeConfig]:
        return [n for n in self.nodes if n.role is role]

    @property
    def center(self) -> NodeConfig:
        return self.nodes_with_role(NodeRole.DATA_CENTER)[0]


class PacketMetrics(BaseModel):
    sent: int = 0
    delivered: int = 0
    dropped_queue: int = 0
    dropped_no_route: int = 0
    dropped_app_stopped: int = 0
    in_flight: int = 0

    @property
    def dropped(self) -> int:
        return self.dropped_queue + self.dropped_no_route + self.dropped_app_stopped

    @property
    def conserved(self) -> bool:
        return self.sent == self.delivered + self.dropped + self.in_flight


class EdgeMetrics(BaseModel):
    node: int
    cache_len: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    cache_evictions: int = 0
    data_requests: int = 0
    fallback: bool = False
    training_samples: int = 0
    epochs_run: int = 0
    final_loss: Optional[float] = None
    training_duration_ns: int = 0
    result_sent: bool = False


class EnsembleMetrics(BaseModel):
    submodels: int = 0
    ready: bool = False
    combine: CombineMode = CombineMode.SOFT_VOTE
    accuracy: Dict[str, Optional[float]] = Field(default_factory=dict, description="Per model, 'ensemble' last")


class MetricsSummary(BaseModel):
    """Counters of one run, mutually consistent with the trace."""

    seed: int
    stop_at_ns: int
    final_time_ns: int = 0
    events_executed: int = 0
    packets: PacketMetrics = Field(default_factory=PacketMetrics)
    model_results_delivered: int = 0
    edges: List[EdgeMetrics] = Field(default_factory=list)
    ensemble: EnsembleMetrics = Field(default_factory=EnsembleMetrics)
    wall_clock_seconds: float = Field(default=0.0, description="Not written to the metrics file")

    @field_validator("edges")
    @classmethod
    def validate_edges(cls, v: List[EdgeMetrics]) -> List[EdgeMetrics]:
        return sorted(v, key=lambda e: e.node)

    def to_lines(self) -> List[str]:
        """``key = value`` lines in stable order, without wall-clock data."""
        lines = [
            "format = 1",
            f"seed = {self.seed}",
            f"stop_at_ns = {self.stop_at_ns}",
            f"final_time_ns = {self.final_time_ns}",
            f"events_executed = {self.events_executed}",
        ]
        for key in ("sent", "delivered", "dropped_queue", "dropped_no_route", "dropped_app_stopped", "in_flight"):
            lines.append(f"packets.{key} = {getattr(self.packets, key)}")
        lines.append(f"packets.model_results_delivered = {self.model_results_delivered}")
        for edge in self.edges:
            prefix = f"edge.{edge.node}"
            lines.extend(
                [
                    f"{prefix}.cache_len = {edge.cache_len}",
                    f"{prefix}.cache_hits = {edge.cache_hits}",
                    f"{prefix}.cache_misses = {edge.cache_misses}",
                    f"{prefix}.cache_evictions = {edge.cache_evictions}",
                    f"{prefix}.data_requests = {edge.data_requests}",
                    f"{prefix}.fallback = {_render_value(edge.fallback)}",
                    f"{prefix}.training_samples = {edge.training_samples}",
                    f"{prefix}.epochs_run = {edge.epochs_run}",
                    f"{prefix}.final_loss = {_render_value(edge.final_loss)}",
                    f"{prefix}.training_duration_ns = {edge.training_duration_ns}",
                    f"{prefix}.result_sent = {_render_value(edge.result_sent)}",
                ]
            )
        lines.append(f"ensemble.submodels = {self.ensemble.submodels}")
        lines.append(f"ensemble.ready = {_render_value(self.ensemble.ready)}")
        lines.append(f"ensemble.combine = {self.ensemble.combine.value}")
        for model, accuracy in self.ensemble.accuracy.items():
            lines.append(f"ensemble.accuracy.{model} = {_render_value(accuracy)}")
        return lines


def _render_value(value: object) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)
