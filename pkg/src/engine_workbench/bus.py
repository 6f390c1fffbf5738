"""In-process publish/subscribe message bus.

One bus instance belongs to one session and is driven from a single
execution context; the bus performs no locking of its own. Dispatch is
synchronous and in registration order. A publish issued from inside a
callback is queued and dispatched after the current dispatch finishes,
so delivery order always follows sequence-number order.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable


class BusError(Exception):
    """Base class for bus usage errors."""


class InvalidTopicError(BusError, ValueError):
    """Raised when a topic identifier is empty."""


class UnknownSubscriptionError(BusError, LookupError):
    """Raised when unsubscribing a handle the bus does not hold."""


@dataclass(frozen=True)
class Message:
    """Envelope delivered to subscribers.

    seq is assigned at publish time and is strictly increasing across all
    messages published on one bus instance.
    """

    topic: str
    payload: dict[str, Any]
    seq: int


@dataclass(frozen=True)
class Subscription:
    """Handle returned by subscribe; pass it back to unsubscribe."""

    handle: int
    topic: str
    callback: Callable[[Message], None]


@dataclass(frozen=True)
class DeliveryFailure:
    """Record of one subscriber callback that raised during dispatch."""

    handle: int
    topic: str
    error: BaseException


@dataclass
class PublishResult:
    """Outcome of one publish call.

    delivered counts every callback invoked for the message, including
    callbacks that raised; those are itemized in failures. For a publish
    issued inside a callback the failures list fills in once the queued
    dispatch runs, which is always before the outermost publish returns.
    """

    message: Message
    delivered: int
    failures: list[DeliveryFailure] = field(default_factory=list)


class MessageBus:
    """Flat-topic, exactly-once, synchronous pub/sub bus."""

    def __init__(self) -> None:
        self._seq = itertools.count(1)
        self._handles = itertools.count(1)
        self._subscribers: dict[str, list[Subscription]] = {}
        self._pending: deque[tuple[Message, list[Subscription], PublishResult]] = deque()
        self._dispatching = False

    def subscribe(self, topic: str, callback: Callable[[Message], None]) -> Subscription:
        """Register callback for every future publish on topic."""
        if not topic:
            raise InvalidTopicError("topic must be non-empty")
        sub = Subscription(handle=next(self._handles), topic=topic, callback=callback)
        self._subscribers.setdefault(topic, []).append(sub)
        return sub

    def unsubscribe(self, subscription: Subscription) -> None:
        """Remove a subscription; unknown or already-removed handles are errors."""
        subs = self._subscribers.get(subscription.topic, [])
        for i, sub in enumerate(subs):
            if sub.handle == subscription.handle:
                del subs[i]
                return
        raise UnknownSubscriptionError(
            f"no active subscription with handle {subscription.handle} on topic {subscription.topic!r}"
        )

    def publish(self, topic: str, payload: dict[str, Any]) -> PublishResult:
        """Deliver payload to every subscriber currently registered on topic.

        The subscriber set is snapshotted here, so callbacks that subscribe
        or unsubscribe during dispatch do not affect this message.
        """
        if not topic:
            raise InvalidTopicError("topic must be non-empty")
        message = Message(topic=topic, payload=payload, seq=next(self._seq))
        snapshot = list(self._subscribers.get(topic, []))
        result = PublishResult(message=message, delivered=len(snapshot))
        self._pending.append((message, snapshot, result))
        if not self._dispatching:
            self._drain()
        return result

    def _drain(self) -> None:
        self._dispatching = True
        try:
            while self._pending:
                message, snapshot, result = self._pending.popleft()
                for sub in snapshot:
                    try:
                        sub.callback(message)
                    except Exception as exc:  # one bad listener must not halt the rest
                        result.failures.append(
                            DeliveryFailure(handle=sub.handle, topic=sub.topic, error=exc)
                        )
        finally:
            self._dispatching = False
