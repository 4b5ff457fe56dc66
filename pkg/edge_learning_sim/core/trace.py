"""Structured simulation trace.

A trace file starts with the header line ``format = 1``; every following line
is one JSON object with keys in the fixed order ``time_ns, event, node, kind,
detail``. Detail values are primitives only, so two runs with the same seed
produce byte-identical files.
"""

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Dict, Iterator, List, Optional, Tuple, Union

from .exceptions import EdgeSimError
from .logging import get_logger

logger = get_logger(__name__)

TRACE_FORMAT_VERSION = 1

Primitive = Union[int, float, str, bool, None]


class TraceKind:
    """Fixed vocabulary of trace record kinds."""

    # network
    PACKET_SEND = "PACKET_SEND"
    PACKET_DELIVER = "PACKET_DELIVER"
    PACKET_DROP = "PACKET_DROP"
    NO_ROUTE = "NO_ROUTE"
    APP_START = "APP_START"
    APP_STOP = "APP_STOP"
    APP_STOPPED_DROP = "APP_STOPPED_DROP"
    # cache
    CACHE_PUT = "CACHE_PUT"
    CACHE_HIT = "CACHE_HIT"
    CACHE_MISS = "CACHE_MISS"
    CACHE_EVICT = "CACHE_EVICT"
    # learning applications
    TRAINING_START = "TRAINING_START"
    TRAINING_DONE = "TRAINING_DONE"
    DATA_REQUEST = "DATA_REQUEST"
    MODEL_RESULT_SENT = "MODEL_RESULT_SENT"
    ENSEMBLE_READY = "ENSEMBLE_READY"
    INSUFFICIENT_FALLBACK = "INSUFFICIENT_FALLBACK"
    DUPLICATE_RESULT = "DUPLICATE_RESULT"
    MALFORMED_PACKET = "MALFORMED_PACKET"
    TRAIN_SKIPPED_EMPTY = "TRAIN_SKIPPED_EMPTY"
    MODEL_EVALUATION = "MODEL_EVALUATION"


@dataclass(frozen=True)
class TraceRecord:
    """One trace line."""

    time: int
    event: Optional[int]
    node: Optional[int]
    kind: str
    detail: Dict[str, Primitive] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "time_ns": self.time,
                "event": self.event,
                "node": self.node,
                "kind": self.kind,
                "detail": self.detail,
            },
            separators=(",", ":"),
            allow_nan=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        raw = json.loads(line)
        return cls(
            time=raw["time_ns"],
            event=raw["event"],
            node=raw["node"],
            kind=raw["kind"],
            detail=raw["detail"],
        )


class Trace:
    """Collects trace records in memory and optionally streams them to a file."""

    def __init__(self, path: Optional[Path] = None, keep_records: bool = True):
        self.path = Path(path) if path is not None else None
        self.keep_records = keep_records
        self.records: List[TraceRecord] = []
        self.counts: Counter = Counter()
        self.node_counts: Counter = Counter()
        self._last_time = 0
        self._fh: Optional[IO[str]] = None
        if self.path is not None:
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._fh = self.path.open("w", encoding="utf-8", newline="\n")
            except OSError as e:
                raise EdgeSimError(f"Cannot open trace file: {e}", details=str(self.path)) from e
            self._fh.write(f"format = {TRACE_FORMAT_VERSION}\n")

    def emit(self, record: TraceRecord) -> None:
        if record.time < self._last_time:
            raise EdgeSimError(
                f"Trace time went backwards: {record.time} < {self._last_time}",
                details=record.kind,
            )
        self._last_time = record.time
        self.counts[record.kind] += 1
        self.node_counts[(record.node, record.kind)] += 1
        if self.keep_records:
            self.records.append(record)
        if self._fh is not None:
            self._fh.write(record.to_json())
            self._fh.write("\n")

    def count(self, kind: str, node: Optional[int] = None) -> int:
        if node is None:
            return self.counts[kind]
        return self.node_counts[(node, kind)]

    def of_kind(self, *kinds: str) -> Iterator[TraceRecord]:
        wanted = set(kinds)
        return (r for r in self.records if r.kind in wanted)

    def for_node(self, node: int) -> Iterator[TraceRecord]:
        return (r for r in self.records if r.node == node)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
            logger.debug(f"Trace written: {self.path}")

    def __enter__(self) -> "Trace":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


def read_trace(path: Path) -> Tuple[int, List[TraceRecord]]:
    """Read a trace file; returns (format version, records)."""
    with Path(path).open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        key, _, value = header.partition("=")
        if key.strip() != "format":
            raise EdgeSimError("Trace file lacks a format header", details=str(path))
        records = [TraceRecord.from_json(line) for line in fh if line.strip()]
    return int(value), records
