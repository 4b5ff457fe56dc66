"""Line-oriented scenario file format.

A scenario file is a sequence of sections holding ``key = value`` lines::

    format = 1

    [scenario]
    seed = 42
    stop_at_ns = 10000000000

    [node 0]
    role = DATA_CENTER

    [link]
    a = 0
    b = 1

Singleton sections are ``[scenario]``, ``[dataset]``, ``[generator]``,
``[training]`` and ``[aggregator]``; ``[node <id>]`` and ``[link]`` repeat.
Lists are comma separated, ``none`` clears an optional value, and lines
starting with ``#`` are comments. Every problem found is reported, each with
its line number.
"""

import re
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, Union

from pydantic import BaseModel, Field, ValidationError

from ..core.exceptions import ConfigIssue, ConfigurationError, ScenarioValidationError
from ..core.logging import get_logger
from ..core.rng import MASK64
from ..models.data_models import (
    AggregatorConfig,
    DatasetSpec,
    GeneratorConfig,
    LinkConfig,
    NodeConfig,
    ScenarioConfig,
    TrainingConfig,
    topology_issues,
)

logger = get_logger(__name__)

CONFIG_FORMAT_VERSION = 1

_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)(?:\s+([^\]\s]+))?\s*\]$")
_ASSIGNMENT = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


class _RunSection(BaseModel):
    seed: int = Field(default=42, ge=0, le=MASK64)
    stop_at_ns: int = Field(default=10_000_000_000, gt=0)


_SINGLETONS: Dict[str, Type[BaseModel]] = {
    "scenario": _RunSection,
    "dataset": DatasetSpec,
    "generator": GeneratorConfig,
    "training": TrainingConfig,
    "aggregator": AggregatorConfig,
}


@dataclass
class _Section:
    name: str
    line: int
    argument: Optional[str] = None
    values: Dict[str, Tuple[str, int]] = field(default_factory=dict)

    def line_of(self, key: str) -> int:
        return self.values[key][1] if key in self.values else self.line


def _is_list_field(model: Type[BaseModel], name: str) -> bool:
    return typing.get_origin(model.model_fields[name].annotation) in (list, List)


def _convert(model: Type[BaseModel], section: _Section) -> Dict[str, Any]:
    raw: Dict[str, Any] = {}
    for key, (value, _) in section.values.items():
        if value.lower() == "none":
            raw[key] = None
        elif _is_list_field(model, key):
            raw[key] = [item.strip() for item in value.split(",") if item.strip()]
        else:
            raw[key] = value
    return raw


def _validate(
    model: Type[BaseModel],
    section: _Section,
    issues: List[ConfigIssue],
    extra: Optional[Dict[str, Any]] = None,
) -> Optional[BaseModel]:
    data = _convert(model, section)
    if extra:
        data.update(extra)
    try:
        return model.model_validate(data)
    except ValidationError as e:
        for error in e.errors():
            loc = error.get("loc") or ()
            name = str(loc[0]) if loc else section.name
            line = section.line_of(name) if loc else section.line
            issues.append(ConfigIssue(line, f"{section.name}.{name}", error["msg"]))
        return None


def _split_sections(text: str, issues: List[ConfigIssue]) -> Tuple[Dict[str, Tuple[str, int]], List[_Section]]:
    preamble: Dict[str, Tuple[str, int]] = {}
    sections: List[_Section] = []
    current: Optional[_Section] = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        header = _SECTION.match(line)
        if header:
            current = _Section(name=header.group(1).lower(), line=number, argument=header.group(2))
            sections.append(current)
            continue
        assignment = _ASSIGNMENT.match(line)
        if assignment is None:
            issues.append(ConfigIssue(number, "syntax", f"expected 'key = value' or '[section]', got {line!r}"))
            continue
        key, value = assignment.group(1), assignment.group(2).strip()
        target = current.values if current is not None else preamble
        where = current.name if current is not None else "format"
        if key in target:
            issues.append(ConfigIssue(number, f"{where}.{key}", f"duplicate key, first set on line {target[key][1]}"))
            continue
        target[key] = (value, number)
    return preamble, sections


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario; raises ScenarioValidationError listing every issue."""
    issues: List[ConfigIssue] = []
    preamble, sections = _split_sections(text, issues)

    for key, (value, line) in preamble.items():
        if key != "format":
            issues.append(ConfigIssue(line, key, "unknown field outside any section"))
        elif value != str(CONFIG_FORMAT_VERSION):
            issues.append(ConfigIssue(line, "format", f"unsupported format {value!r}, expected {CONFIG_FORMAT_VERSION}"))

    singletons: Dict[str, BaseModel] = {}
    seen: Dict[str, int] = {}
    nodes: List[NodeConfig] = []
    node_sections: List[_Section] = []
    links: List[LinkConfig] = []
    link_sections: List[_Section] = []
    structural_failure = False

    for section in sections:
        model: Optional[Type[BaseModel]]
        if section.name in _SINGLETONS:
            model = _SINGLETONS[section.name]
        elif section.name == "node":
            model = NodeConfig
        elif section.name == "link":
            model = LinkConfig
        else:
            issues.append(ConfigIssue(section.line, section.name, "unknown section"))
            continue

        allowed = set(model.model_fields) - ({"id"} if model is NodeConfig else set())
        for key in section.values:
            if key not in allowed:
                issues.append(ConfigIssue(section.line_of(key), f"{section.name}.{key}", "unknown field"))
        section.values = {k: v for k, v in section.values.items() if k in allowed}

        if section.name in _SINGLETONS:
            if section.argument is not None:
                issues.append(ConfigIssue(section.line, section.name, "section takes no argument"))
            if section.name in seen:
                issues.append(
                    ConfigIssue(section.line, section.name, f"duplicate section, first on line {seen[section.name]}")
                )
                continue
            seen[section.name] = section.line
            parsed = _validate(model, section, issues)
            if parsed is None:
                structural_failure = True
            else:
                singletons[section.name] = parsed
        elif section.name == "node":
            if section.argument is None or not section.argument.isdigit():
                issues.append(ConfigIssue(section.line, "node", "expected '[node <id>]' with a non-negative id"))
                structural_failure = True
                continue
            node = _validate(NodeConfig, section, issues, extra={"id": int(section.argument)})
            if node is None:
                structural_failure = True
            else:
                assert isinstance(node, NodeConfig)
                nodes.append(node)
                node_sections.append(section)
        else:
            if section.argument is not None:
                issues.append(ConfigIssue(section.line, "link", "section takes no argument"))
            link = _validate(LinkConfig, section, issues)
            if link is None:
                structural_failure = True
            else:
                assert isinstance(link, LinkConfig)
                links.append(link)
                link_sections.append(section)

    if not nodes and not structural_failure:
        issues.append(ConfigIssue(None, "node", "a scenario needs at least one [node <id>] section"))
    elif nodes and not structural_failure:
        for problem in topology_issues(nodes, links):
            owner = node_sections[problem.index] if problem.section == "node" else link_sections[problem.index]
            line = owner.line_of(problem.field) if problem.field in owner.values else owner.line
            issues.append(ConfigIssue(line, f"{problem.section}.{problem.field}", problem.message))

    if issues:
        issues.sort(key=lambda i: (i.line is None, i.line or 0))
        raise ScenarioValidationError(issues)

    run = singletons.get("scenario", _RunSection())
    assert isinstance(run, _RunSection)
    config = ScenarioConfig(
        seed=run.seed,
        stop_at_ns=run.stop_at_ns,
        dataset=singletons.get("dataset", DatasetSpec()),
        generator=singletons.get("generator", GeneratorConfig()),
        training=singletons.get("training", TrainingConfig()),
        aggregator=singletons.get("aggregator", AggregatorConfig()),
        nodes=nodes,
        links=links,
    )
    logger.debug(f"Parsed scenario: {len(config.nodes)} nodes, {len(config.links)} links")
    return config


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read scenario file {path}: {e}", details=str(path)) from e
    return parse_config(text)


def _render_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(_render_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _render_section(lines: List[str], header: str, model: BaseModel, skip: Tuple[str, ...] = ()) -> None:
    lines.append("")
    lines.append(f"[{header}]")
    for name in type(model).model_fields:
        if name in skip:
            continue
        lines.append(f"{name} = {_render_value(getattr(model, name))}")


def render_config(config: ScenarioConfig) -> str:
    """Render a scenario in the canonical layout; parsing the result gives an equal config."""
    lines = [f"format = {CONFIG_FORMAT_VERSION}"]
    _render_section(lines, "scenario", _RunSection(seed=config.seed, stop_at_ns=config.stop_at_ns))
    _render_section(lines, "dataset", config.dataset)
    _render_section(lines, "generator", config.generator)
    _render_section(lines, "training", config.training)
    _render_section(lines, "aggregator", config.aggregator)
    for node in config.nodes:
        _render_section(lines, f"node {node.id}", node, skip=("id",))
    for link in config.links:
        _render_section(lines, "link", link)
    return "\n".join(lines) + "\n"
