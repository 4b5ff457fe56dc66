"""Scenario and metrics data models."""

from .data_models import (
    AggregatorConfig,
    DatasetKind,
    DatasetSpec,
    EdgeMetrics,
    EnsembleMetrics,
    GeneratorConfig,
    LinkConfig,
    MetricsSummary,
    NodeConfig,
    NodeRole,
    PacketMetrics,
    ScenarioConfig,
    TopologyIssue,
    TrainingConfig,
    topology_issues,
)

__all__ = [
    "AggregatorConfig",
    "DatasetKind",
    "DatasetSpec",
    "EdgeMetrics",
    "EnsembleMetrics",
    "GeneratorConfig",
    "LinkConfig",
    "MetricsSummary",
    "NodeConfig",
    "NodeRole",
    "PacketMetrics",
    "ScenarioConfig",
    "TopologyIssue",
    "TrainingConfig",
    "topology_issues",
]
