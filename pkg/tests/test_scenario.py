"""Test scenario files, assembly and full runs."""

import pytest

from edge_learning_sim.core.exceptions import ConfigurationError, ScenarioValidationError
from edge_learning_sim.core.trace import TraceKind, read_trace
from edge_learning_sim.models import NodeRole, ScenarioConfig
from edge_learning_sim.network.packet import PacketKind
from edge_learning_sim.scenario import (
    DEFAULT_SCENARIO,
    build_scenario,
    load_config,
    parse_config,
    render_config,
    run_scenario,
)


def default_text() -> str:
    return DEFAULT_SCENARIO.read_text(encoding="utf-8")


def line_of(text: str, needle: str) -> int:
    """1-based line number of the last line equal to ``needle``."""
    lines = text.splitlines()
    return max(i for i, line in enumerate(lines, start=1) if line.strip() == needle)


def modified(config: ScenarioConfig, **changes) -> ScenarioConfig:
    data = config.model_dump()
    data.update(changes)
    return ScenarioConfig.model_validate(data)


class TestParse:
    """Test reading scenario files."""

    def test_default_topology(self, default_config):
        """Test the shipped tree of eight nodes and seven gigabit links."""
        assert len(default_config.nodes) == 8
        assert len(default_config.links) == 7
        assert all(link.rate_bps == 1_000_000_000 for link in default_config.links)
        assert default_config.center.id == 0
        assert [n.id for n in default_config.nodes_with_role(NodeRole.EDGE)] == [2, 3]
        assert [n.id for n in default_config.nodes_with_role(NodeRole.TERMINAL)] == [4, 5, 6, 7]
        assert default_config.training.hidden == [8]

    def test_two_data_centers(self):
        """Test that a second DATA_CENTER is reported with its line."""
        text = default_text().replace("[node 1]\nrole = GATEWAY", "[node 1]\nrole = DATA_CENTER")

        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_config(text)

        [issue] = [i for i in exc_info.value.issues if i.field == "node.role"]
        assert "exactly one DATA_CENTER" in issue.message
        assert issue.line == line_of(text, "role = DATA_CENTER")

    def test_dangling_link_endpoint(self):
        """Test a link to an undeclared node."""
        text = default_text().replace("a = 1\nb = 0", "a = 1\nb = 9")

        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_config(text)

        [issue] = exc_info.value.issues
        assert issue.field == "link.b"
        assert issue.line == line_of(text, "b = 9")
        assert "dangling" in issue.message

    def test_unknown_field(self):
        """Test that an unknown key is named with its section."""
        text = default_text().replace("[training]\n", "[training]\nfoo = 1\n")

        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_config(text)

        [issue] = exc_info.value.issues
        assert issue.field == "training.foo"
        assert issue.line == line_of(text, "foo = 1")

    def test_every_issue_is_reported(self):
        """Test that independent problems are collected together."""
        text = (
            default_text()
            .replace("format = 1", "format = 2")
            .replace("seed = 42", "seed = -1")
            .replace("[aggregator]", "[aggregator]\nbogus = x")
        ) + "\njust words\n"

        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_config(text)

        fields = {issue.field for issue in exc_info.value.issues}
        assert {"format", "scenario.seed", "aggregator.bogus", "syntax"} <= fields
        lines = [issue.line for issue in exc_info.value.issues]
        assert lines == sorted(lines)

    def test_bad_node_header(self):
        """Test that node sections need a numeric id."""
        text = default_text().replace("[node 7]", "[node seven]")

        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_config(text)

        assert any(issue.field == "node" for issue in exc_info.value.issues)

    def test_missing_file(self, tmp_path):
        """Test an unreadable scenario path."""
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.scn")


class TestRender:
    """Test the canonical layout."""

    def test_render_parse_fixpoint(self, default_config):
        """Test that rendering and parsing reproduce the config and its text."""
        text = render_config(default_config)
        reparsed = parse_config(text)

        assert reparsed == default_config
        assert render_config(reparsed) == text

    def test_render_optional_values(self, default_config):
        """Test none, lists and booleans in rendered text."""
        config = modified(default_config, seed=7)

        text = render_config(config)

        assert "seed = 7" in text
        assert "image_height = none" in text
        assert "probabilistic = true" in text
        assert "neighbors = 3" in text


class TestAssembly:
    """Test building a scenario into a simulation."""

    def test_apps_per_role(self, default_config):
        """Test one aggregator, one trainer per edge and one generator per terminal."""
        scenario = build_scenario(default_config)

        assert scenario.aggregator is not None
        assert sorted(scenario.trainers) == [2, 3]
        assert sorted(scenario.generators) == [4, 5, 6, 7]
        assert scenario.network.node(2).cache.capacity == 100
        assert scenario.network.node(0).cache is None
        assert str(scenario.network.node(7).address) == "10.0.0.8"

    def test_stop_before_generators_start(self, default_config):
        """Test that a run ending before the terminals start sends nothing."""
        config = modified(default_config, stop_at_ns=500_000_000)

        summary = run_scenario(config)

        assert summary.packets.sent == 0
        assert summary.final_time_ns <= 500_000_000
        assert not summary.ensemble.ready


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    directory = tmp_path_factory.mktemp("default-run")
    config = load_config(DEFAULT_SCENARIO)
    scenario = build_scenario(config)
    summary = scenario.run()
    files = directory / "trace.jsonl", directory / "metrics.txt"
    run_scenario(config, *files)
    return scenario, summary, files


class TestDefaultRun:
    """Test a full run of the shipped scenario."""

    def test_two_results_and_one_ensemble(self, default_run):
        """Test that both edges report and the center ensembles once."""
        scenario, summary, _ = default_run
        trace = scenario.trace

        assert summary.model_results_delivered == 2
        assert trace.count(TraceKind.ENSEMBLE_READY) == 1
        assert trace.count(TraceKind.ENSEMBLE_READY, node=0) == 1
        assert summary.ensemble.ready
        assert summary.ensemble.submodels == 2
        assert list(summary.ensemble.accuracy)[-1] == "ensemble"

    def test_edge_sequence(self, default_run):
        """Test cache, train, upload and ensemble order per edge."""
        scenario, _, _ = default_run
        trace = scenario.trace
        ready_at = next(trace.of_kind(TraceKind.ENSEMBLE_READY)).time
        for edge in (2, 3):
            records = list(trace.for_node(edge))
            puts = [r.time for r in records if r.kind == TraceKind.CACHE_PUT]
            start = next(r.time for r in records if r.kind == TraceKind.TRAINING_START)
            done = next(r.time for r in records if r.kind == TraceKind.TRAINING_DONE)
            sent = next(r.time for r in records if r.kind == TraceKind.MODEL_RESULT_SENT)

            assert len(puts) == 100
            assert max(puts) <= start <= done <= sent < ready_at

    def test_metrics_match_trace(self, default_run):
        """Test that every metrics counter equals its trace count."""
        scenario, summary, _ = default_run
        trace = scenario.trace
        packets = summary.packets

        assert packets.sent == trace.count(TraceKind.PACKET_SEND)
        assert packets.delivered == trace.count(TraceKind.PACKET_DELIVER)
        assert packets.dropped_queue == trace.count(TraceKind.PACKET_DROP)
        assert packets.dropped_no_route == trace.count(TraceKind.NO_ROUTE)
        assert packets.dropped_app_stopped == trace.count(TraceKind.APP_STOPPED_DROP)
        assert packets.conserved
        for edge in summary.edges:
            assert edge.cache_hits == trace.count(TraceKind.CACHE_HIT, node=edge.node)
            assert edge.cache_misses == trace.count(TraceKind.CACHE_MISS, node=edge.node)
            assert edge.cache_evictions == trace.count(TraceKind.CACHE_EVICT, node=edge.node)
            assert edge.data_requests == trace.count(TraceKind.DATA_REQUEST, node=edge.node)
            assert edge.training_samples == 100
            assert edge.result_sent
            assert not edge.fallback

    def test_run_is_reproducible(self, default_run, tmp_path):
        """Test byte-identical trace and metrics files for the same seed."""
        _, _, (trace_path, metrics_path) = default_run
        again = tmp_path / "trace.jsonl", tmp_path / "metrics.txt"

        run_scenario(load_config(DEFAULT_SCENARIO), *again)

        assert again[0].read_bytes() == trace_path.read_bytes()
        assert again[1].read_bytes() == metrics_path.read_bytes()

    def test_trace_file_matches_memory(self, default_run):
        """Test that the written trace holds the same records as an in-memory run."""
        scenario, _, (trace_path, _) = default_run

        version, records = read_trace(trace_path)

        assert version == 1
        assert [r.kind for r in records] == [r.kind for r in scenario.trace.records]

    def test_metrics_file(self, default_run):
        """Test the metrics file layout."""
        _, summary, (_, metrics_path) = default_run

        lines = metrics_path.read_text(encoding="utf-8").splitlines()

        assert lines[0] == "format = 1"
        assert "packets.model_results_delivered = 2" in lines
        assert "ensemble.ready = true" in lines
        assert not any("wall" in line for line in lines)
        assert lines == summary.to_lines()


class TestVariants:
    """Test scenario variants."""

    def test_short_terminals_trigger_neighbor_request(self, default_config):
        """Test that an edge with too few samples borrows from its neighbor."""
        data = default_config.model_dump()
        for node in data["nodes"]:
            if node["id"] in (6, 7):
                node["samples_to_send"] = 20
        config = ScenarioConfig.model_validate(data)

        scenario = build_scenario(config)
        summary = scenario.run()
        trace = scenario.trace

        [request] = [r for r in trace.of_kind(TraceKind.DATA_REQUEST) if r.node == 3]
        assert request.time == config.training.sufficiency_deadline_ns
        assert request.detail["count"] == 60
        edge = next(e for e in summary.edges if e.node == 3)
        assert edge.training_samples == 100
        assert not edge.fallback
        assert summary.ensemble.ready
        assert trace.count(TraceKind.DATA_REQUEST, node=2) == 0

    def test_zero_collection_window(self, default_config):
        """Test that edges without a collection window still train on arriving data."""
        data = default_config.model_dump()
        data["training"]["sufficiency_deadline_ns"] = 0
        config = ScenarioConfig.model_validate(data)

        scenario = build_scenario(config)
        summary = scenario.run()
        trace = scenario.trace

        assert trace.count(TraceKind.TRAIN_SKIPPED_EMPTY) == 0
        assert trace.count(TraceKind.TRAINING_START) == 2
        for edge in (2, 3):
            first_put = next(r.time for r in trace.for_node(edge) if r.kind == TraceKind.CACHE_PUT)
            start = next(r.time for r in trace.for_node(edge) if r.kind == TraceKind.TRAINING_START)
            assert first_put <= start
        assert summary.ensemble.ready
        assert summary.model_results_delivered == 2

    def test_queue_stress_conserves_packets(self, default_config):
        """Test conservation with two-packet queues and back-to-back sends."""
        data = default_config.model_dump()
        for link in data["links"]:
            link["queue_capacity"] = 2
        data["generator"]["inter_send_gap_ns"] = 0
        config = ScenarioConfig.model_validate(data)

        summary = run_scenario(config)

        assert summary.packets.dropped_queue > 0
        assert summary.packets.conserved

    def test_hard_vote(self, default_config):
        """Test the hard-vote ensemble variant end to end."""
        data = default_config.model_dump()
        data["aggregator"]["combine"] = "hard_vote"

        summary = run_scenario(ScenarioConfig.model_validate(data))

        assert summary.ensemble.ready
        assert summary.ensemble.combine.value == "hard_vote"
        assert summary.ensemble.accuracy["ensemble"] is not None

    def test_model_results_reach_center(self, default_config):
        """Test MODEL_RESULT deliveries at the data center."""
        scenario = build_scenario(default_config)
        scenario.run()

        delivered = [
            r
            for r in scenario.trace.of_kind(TraceKind.PACKET_DELIVER)
            if r.detail["kind"] == PacketKind.MODEL_RESULT.value
        ]
        assert [r.node for r in delivered] == [0, 0]
