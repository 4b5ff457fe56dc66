"""Deterministic discrete-event engine.

Events execute in (fire_at, event id) order, so events at the same timestamp
run in the order they were scheduled. Time is integer nanoseconds.
"""

import heapq
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

from .exceptions import InvalidArgumentError, SimulationError
from .logging import get_logger, sim_clock
from .rng import MASK64, RandomStream
from .trace import Primitive, Trace, TraceRecord

logger = get_logger(__name__)

SimTime = int
EventId = int
Action = Callable[..., Any]


def round_half_up_div(numerator: int, denominator: int) -> int:
    """Integer ``numerator / denominator`` rounded half up (both non-negative)."""
    return (2 * numerator + denominator) // (2 * denominator)


@dataclass
class Event:
    """A scheduled action."""

    id: EventId
    fire_at: SimTime
    action: Action
    args: Tuple[Any, ...] = ()
    cancelled: bool = False

    def __lt__(self, other: "Event") -> bool:
        return (self.fire_at, self.id) < (other.fire_at, other.id)


@dataclass(frozen=True)
class RunStats:
    events_executed: int
    final_time: SimTime


class Simulator:
    """Simulated clock, event queue, random streams and trace emission.

    A simulator instance is single-threaded; independent instances share no
    mutable state.
    """

    def __init__(self, seed: int = 0, trace: Optional[Trace] = None):
        if seed < 0:
            raise InvalidArgumentError(f"Seed must be non-negative: {seed}")
        self.seed = seed & MASK64
        self.trace = trace if trace is not None else Trace()
        self._now: SimTime = 0
        self._queue: List[Event] = []
        self._pending: Dict[EventId, Event] = {}
        self._next_id: EventId = 0
        self._current: Optional[Event] = None
        self._running = False
        self.scheduled_count = 0
        self.executed_count = 0
        self.cancelled_count = 0

    @property
    def now(self) -> SimTime:
        return self._now

    @property
    def current_event_id(self) -> Optional[EventId]:
        return self._current.id if self._current is not None else None

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def schedule(self, delay: int, action: Action, *args: Any) -> EventId:
        """Schedule ``action(*args)`` to run ``delay`` ns from now."""
        if delay < 0:
            raise InvalidArgumentError(f"Event delay must be >= 0, got {delay}")
        event = Event(id=self._next_id, fire_at=self._now + int(delay), action=action, args=args)
        self._next_id += 1
        self.scheduled_count += 1
        self._pending[event.id] = event
        heapq.heappush(self._queue, event)
        return event.id

    def schedule_at(self, time: SimTime, action: Action, *args: Any) -> EventId:
        if time < self._now:
            raise InvalidArgumentError(f"Cannot schedule in the past: {time} < {self._now}")
        return self.schedule(time - self._now, action, *args)

    def cancel(self, event_id: EventId) -> bool:
        """Suppress a pending event. False if it already fired, was cancelled, or is unknown."""
        event = self._pending.pop(event_id, None)
        if event is None:
            return False
        event.cancelled = True
        self.cancelled_count += 1
        return True

    def is_pending(self, event_id: EventId) -> bool:
        return event_id in self._pending

    def run_until(self, limit: SimTime) -> RunStats:
        """Execute every pending event with ``fire_at <= limit``."""
        if self._running:
            raise SimulationError("Simulator is already running")
        self._running = True
        executed = 0
        try:
            with sim_clock(lambda: self._now):
                while self._queue and self._queue[0].fire_at <= limit:
                    event = heapq.heappop(self._queue)
                    if event.cancelled:
                        continue
                    del self._pending[event.id]
                    self._now = event.fire_at
                    self._current = event
                    try:
                        event.action(*event.args)
                    except SimulationError:
                        raise
                    except Exception as e:
                        name = getattr(event.action, "__qualname__", repr(event.action))
                        raise SimulationError(
                            f"Event {event.id} ({name}) failed at t={event.fire_at}: {e}",
                            event_id=event.id,
                            details=type(e).__name__,
                        ) from e
                    finally:
                        self._current = None
                    executed += 1
                    self.executed_count += 1
        finally:
            self._running = False
        logger.debug(f"run_until({limit}): {executed} events, now={self._now}")
        return RunStats(events_executed=executed, final_time=self._now)

    def rng_stream(self, name: str) -> RandomStream:
        """A stream whose sequence depends only on (seed, name)."""
        return RandomStream(name, self.seed)

    def emit(self, kind: str, /, node: Optional[int] = None, **detail: Primitive) -> None:
        """Append a trace record stamped with the current time and event."""
        self.trace.emit(
            TraceRecord(
                time=self._now,
                event=self.current_event_id,
                node=node,
                kind=kind,
                detail=detail,
            )
        )
