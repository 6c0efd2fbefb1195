"""Deterministic in-process message transport.

Topics carry streamed payloads (the distance samples); services follow a
request/response pattern with per-service latency and per-call timeouts.
Everything is tick-phased: publishes and calls are stamped with the current
tick, and tick_deliver() hands back whatever is due in (deliver_tick,
sequence) order. One global sequence counter makes the delivery order total
and reproducible. Topics are lossless and in-order; handlers run at call
time, so a response that would arrive after the timeout is computed anyway
and then dropped.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from .errors import ConfigError, ProtocolError

CANONICAL_TOPICS = ("distance_samples",)
CANONICAL_SERVICES = ("try_gesture", "face_id", "tracker_enable", "home_base")


class DeliveryKind(Enum):
    TOPIC = "topic"
    SERVICE = "service"


class ServiceOutcome(Enum):
    RESPONSE = "response"
    TIMEOUT = "timeout"
    NOT_FOUND = "not_found"


@dataclass(frozen=True, slots=True)
class Envelope:
    """One queued delivery: a topic message or a service call outcome."""

    sequence: int
    sent_tick: int
    deliver_tick: int
    kind: DeliveryKind
    name: str  # topic or service name
    payload: Any = None
    outcome: ServiceOutcome | None = None  # service deliveries only
    request_id: int | None = None


@dataclass(slots=True)
class ServiceCallHandle:
    """Pending service call; resolves to exactly one terminal outcome."""

    request_id: int
    service: str
    request: Any
    issued_tick: int
    timeout_ticks: int
    outcome: ServiceOutcome | None = None
    response: Any = None

    @property
    def pending(self) -> bool:
        return self.outcome is None


@dataclass(frozen=True, slots=True)
class ServiceLogEntry:
    tick: int
    service: str
    request_id: int
    request: Any


@dataclass(frozen=True, slots=True)
class _Registration:
    handler: Callable[[Any], Any]
    latency_ticks: int


class MessageBus:
    def __init__(self):
        self._topics: set[str] = set()
        self._services: dict[str, _Registration] = {}
        self._queue: list[tuple[int, int, Envelope, ServiceCallHandle | None]] = []
        self._seq = 0
        self._next_request_id = 0
        self._now = 0
        self._delivered_tick = -1
        self.call_log: list[ServiceLogEntry] = []

    # --- registration -------------------------------------------------

    def declare_topic(self, name: str) -> None:
        if name in self._topics:
            raise ConfigError(f"topic {name!r} already declared")
        self._topics.add(name)

    def register_service(
        self, name: str, handler: Callable[[Any], Any], latency_ticks: int = 0
    ) -> None:
        if name in self._services:
            raise ConfigError(f"service {name!r} already registered")
        if latency_ticks < 0:
            raise ConfigError(f"latency_ticks must be >= 0, got {latency_ticks}")
        self._services[name] = _Registration(handler, latency_ticks)

    # --- tick clock -----------------------------------------------------

    def begin_tick(self, now: int) -> None:
        """Advance the bus clock; all publishes/calls until the next
        begin_tick are stamped with this tick."""
        if now < self._now:
            raise ProtocolError(f"bus clock cannot move backwards ({self._now} -> {now})")
        self._now = now

    # --- producing ------------------------------------------------------

    def publish(self, topic: str, payload: Any, latency_ticks: int = 0) -> None:
        if topic not in self._topics:
            raise ConfigError(f"publish to undeclared topic {topic!r}")
        env = Envelope(
            sequence=self._seq,
            sent_tick=self._now,
            deliver_tick=self._now + latency_ticks,
            kind=DeliveryKind.TOPIC,
            name=topic,
            payload=payload,
        )
        self._push(env, None)

    def call_service(
        self, name: str, request: Any = None, timeout_ticks: int = 40
    ) -> ServiceCallHandle:
        """Issue a request. The outcome (Response, Timeout, or NotFound)
        arrives through tick_deliver; NotFound resolves immediately as well."""
        handle = ServiceCallHandle(
            request_id=self._next_request_id,
            service=name,
            request=request,
            issued_tick=self._now,
            timeout_ticks=timeout_ticks,
        )
        self._next_request_id += 1
        self.call_log.append(ServiceLogEntry(self._now, name, handle.request_id, request))

        reg = self._services.get(name)
        if reg is None:
            handle.outcome = ServiceOutcome.NOT_FOUND
            self._push_service(handle, ServiceOutcome.NOT_FOUND, None, self._now)
            return handle

        response = reg.handler(request)
        if reg.latency_ticks > timeout_ticks:
            # late response is dropped; the caller sees only the timeout
            self._push_service(
                handle, ServiceOutcome.TIMEOUT, None, self._now + timeout_ticks
            )
        else:
            self._push_service(
                handle, ServiceOutcome.RESPONSE, response, self._now + reg.latency_ticks
            )
        return handle

    # --- delivering -----------------------------------------------------

    def tick_deliver(self, now: int) -> list[Envelope]:
        """Return everything due at or before `now`, oldest first, sequence
        breaking ties. A second call in the same tick returns nothing."""
        if now < self._delivered_tick:
            raise ProtocolError(
                f"tick_deliver moved backwards ({self._delivered_tick} -> {now})"
            )
        if now == self._delivered_tick:
            return []
        self._delivered_tick = now
        due: list[Envelope] = []
        while self._queue and self._queue[0][0] <= now:
            _, _, env, handle = heapq.heappop(self._queue)
            if handle is not None and handle.outcome is None:
                handle.outcome = env.outcome
                handle.response = env.payload
            due.append(env)
        return due

    # --- internals --------------------------------------------------------

    def _push(self, env: Envelope, handle: ServiceCallHandle | None) -> None:
        heapq.heappush(self._queue, (env.deliver_tick, env.sequence, env, handle))
        self._seq += 1

    def _push_service(
        self,
        handle: ServiceCallHandle,
        outcome: ServiceOutcome,
        payload: Any,
        deliver_tick: int,
    ) -> None:
        env = Envelope(
            sequence=self._seq,
            sent_tick=self._now,
            deliver_tick=deliver_tick,
            kind=DeliveryKind.SERVICE,
            name=handle.service,
            payload=payload,
            outcome=outcome,
            request_id=handle.request_id,
        )
        self._push(env, handle)
