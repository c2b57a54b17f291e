"""Minimal in-process pub/sub bus plus the serial-style wire framing.

Topics are registered with a payload validator; publishing assigns a
per-(publisher, topic) sequence number and delivers synchronously to every
subscriber in publish order.  Handlers must be fast and non-blocking:
stations enqueue onto their own queues and do real work on their own
threads.  Delivery is at-most-once with no persistence.

Wire frames are one UTF-8 JSON object per line with a trailing CRC32
field: {"topic": ..., "seq": ..., "payload": ..., "crc": "<hex>"}.  The
CRC is computed over the canonical (sorted-key, compact) serialization of
the frame minus the crc field, so any single corrupted payload byte is
detected.
"""

from __future__ import annotations

import json
import threading
import zlib
from dataclasses import dataclass, field


class UnknownTopic(KeyError):
    pass


class SchemaMismatch(ValueError):
    pass


class SerialFrameCorrupt(ValueError):
    pass


@dataclass(frozen=True)
class BusMessage:
    """Topic-addressed, sequence-numbered envelope.

    publisher is bus-side bookkeeping (seq numbers are per publisher per
    topic); it does not travel in wire frames.
    """

    topic: str
    seq: int
    payload: dict
    publisher: str = ""


@dataclass
class Subscription:
    topic: str | None  # None subscribes to every topic
    handler: object
    active: bool = True


@dataclass
class _TopicEntry:
    validator: object | None = None
    retain: bool = False
    retained: BusMessage | None = None
    subs: list[Subscription] = field(default_factory=list)


class Bus:
    """Thread-safe pub/sub core; per-publisher per-topic FIFO delivery."""

    def __init__(self):
        self._lock = threading.RLock()
        self._topics: dict[str, _TopicEntry] = {}
        self._all_subs: list[Subscription] = []
        self._seq: dict[tuple[str, str], int] = {}

    def register_topic(self, name: str, validator=None, retain: bool = False):
        with self._lock:
            if name in self._topics:
                raise ValueError(f"topic {name!r} already registered")
            self._topics[name] = _TopicEntry(validator=validator, retain=retain)

    def topics(self) -> list[str]:
        with self._lock:
            return sorted(self._topics)

    def validate(self, topic: str, payload: dict):
        """Check payload against the topic schema; raises UnknownTopic / SchemaMismatch."""
        with self._lock:
            entry = self._topics.get(topic)
        if entry is None:
            raise UnknownTopic(topic)
        if entry.validator is not None:
            entry.validator(payload)

    def subscribe(self, topic: str | None, handler) -> Subscription:
        """Register a handler; topic=None receives every message.

        The handler runs on the publisher's thread and must not block.
        """
        sub = Subscription(topic, handler)
        with self._lock:
            if topic is None:
                self._all_subs.append(sub)
            else:
                entry = self._topics.get(topic)
                if entry is None:
                    raise UnknownTopic(topic)
                entry.subs.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription):
        with self._lock:
            sub.active = False
            if sub.topic is None:
                if sub in self._all_subs:
                    self._all_subs.remove(sub)
            else:
                entry = self._topics.get(sub.topic)
                if entry and sub in entry.subs:
                    entry.subs.remove(sub)

    def retained(self, topic: str) -> BusMessage | None:
        with self._lock:
            entry = self._topics.get(topic)
            if entry is None:
                raise UnknownTopic(topic)
            return entry.retained

    def publish(self, topic: str, payload: dict, publisher: str = "") -> int:
        """Validate, stamp a sequence number, and deliver; returns the seq."""
        with self._lock:
            entry = self._topics.get(topic)
            if entry is None:
                raise UnknownTopic(topic)
            if entry.validator is not None:
                entry.validator(payload)
            key = (publisher, topic)
            seq = self._seq.get(key, 0) + 1
            self._seq[key] = seq
            msg = BusMessage(topic, seq, payload, publisher)
            if entry.retain:
                entry.retained = msg
            targets = [s for s in entry.subs if s.active]
            targets += [s for s in self._all_subs if s.active]
            # Delivered under the lock: a publish is observed in full by
            # every subscriber before the next one starts.
            for sub in targets:
                sub.handler(msg)
        return seq


class QueueSubscriber:
    """Handler that feeds a queue; the station drains it on its own thread."""

    def __init__(self, queue, drop_publisher: str | None = None):
        self._queue = queue
        self._drop = drop_publisher

    def __call__(self, msg: BusMessage):
        if self._drop is not None and msg.publisher == self._drop:
            return
        self._queue.put(msg)


def _canonical(topic: str, seq: int, payload: dict) -> str:
    return json.dumps(
        {"topic": topic, "seq": seq, "payload": payload},
        sort_keys=True,
        separators=(",", ":"),
    )


def frame_encode(msg: BusMessage) -> bytes:
    """One newline-terminated frame; CRC32 over the canonical crc-less body."""
    crc = zlib.crc32(_canonical(msg.topic, msg.seq, msg.payload).encode("utf-8"))
    line = json.dumps(
        {"topic": msg.topic, "seq": msg.seq, "payload": msg.payload, "crc": f"{crc:08x}"},
        separators=(",", ":"),
    )
    return line.encode("utf-8") + b"\n"


def frame_decode(frame: bytes) -> BusMessage:
    """Inverse of frame_encode; raises SerialFrameCorrupt on any damage."""
    line = frame.rstrip(b"\n")
    if not line:
        raise SerialFrameCorrupt("empty frame")
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SerialFrameCorrupt(f"unparsable frame: {e}") from e
    if not isinstance(obj, dict):
        raise SerialFrameCorrupt("frame is not a JSON object")
    try:
        topic = obj["topic"]
        seq = obj["seq"]
        payload = obj["payload"]
        crc_hex = obj["crc"]
    except KeyError as e:
        raise SerialFrameCorrupt(f"missing frame field {e}") from e
    if (
        not isinstance(topic, str)
        or not isinstance(seq, int)
        or isinstance(seq, bool)
        or not isinstance(payload, dict)
        or not isinstance(crc_hex, str)
    ):
        raise SerialFrameCorrupt("frame field has wrong type")
    expect = zlib.crc32(_canonical(topic, seq, payload).encode("utf-8"))
    try:
        got = int(crc_hex, 16)
    except ValueError as e:
        raise SerialFrameCorrupt("crc field is not hex") from e
    if got != expect:
        raise SerialFrameCorrupt(f"crc mismatch: frame {crc_hex}, computed {expect:08x}")
    return BusMessage(topic, seq, payload)
