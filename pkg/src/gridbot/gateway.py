"""WebSocket gateway: external clients join the bus as ordinary
publishers/subscribers.

Wire schema is the same JSON as the serial frames minus the CRC (the
transport handles integrity): {"topic": ..., "seq": ..., "payload": ...},
one message per text frame.  Clients publish by sending {"topic", "payload"};
schema violations get an {"error": ...} reply and the connection stays up.

On connect a client immediately receives the retained /map, /pose, and
/plan/result snapshots, then every subsequent bus message.
"""

from __future__ import annotations

import itertools
import json
import queue
import threading

from websockets.exceptions import ConnectionClosed
from websockets.sync.server import serve

from .bus import Bus, BusMessage, SchemaMismatch, UnknownTopic

SNAPSHOT_TOPICS = ("/map", "/pose", "/plan/result")


class BindFailure(OSError):
    pass


def _wire(msg: BusMessage) -> str:
    return json.dumps({"topic": msg.topic, "seq": msg.seq, "payload": msg.payload})


class Gateway:
    """Bridges the in-process bus to WebSocket clients."""

    def __init__(self, bus: Bus, host: str = "127.0.0.1", port: int = 8400):
        self.bus = bus
        try:
            self._server = serve(self._handle_client, host, port)
        except OSError as e:
            raise BindFailure(f"cannot bind gateway to {host}:{port}: {e}") from e
        self.host, self.port = self._server.socket.getsockname()[:2]
        self._thread = threading.Thread(
            name="gateway", target=self._server.serve_forever, daemon=True
        )
        self._ids = itertools.count(1)

    def start(self):
        self._thread.start()

    def stop(self):
        self._server.shutdown()
        self._thread.join(timeout=5.0)

    @property
    def url(self) -> str:
        return f"ws://{self.host}:{self.port}"

    def _handle_client(self, ws):
        client_id = f"ws-{next(self._ids)}"
        outbox: queue.SimpleQueue = queue.SimpleQueue()
        sub = self.bus.subscribe(None, lambda msg: outbox.put(_wire(msg)))
        for topic in SNAPSHOT_TOPICS:
            retained = self.bus.retained(topic)
            if retained is not None:
                outbox.put(_wire(retained))

        def pump():
            while True:
                item = outbox.get()
                if item is None:
                    return
                try:
                    ws.send(item)
                except ConnectionClosed:
                    return

        sender = threading.Thread(name=f"{client_id}-tx", target=pump, daemon=True)
        sender.start()
        try:
            while True:
                try:
                    raw = ws.recv()
                except ConnectionClosed:
                    break
                reply = self._publish_from_client(raw, client_id)
                if reply is not None:
                    outbox.put(json.dumps({"error": reply}))
        finally:
            self.bus.unsubscribe(sub)
            outbox.put(None)
            sender.join(timeout=2.0)

    def _publish_from_client(self, raw, client_id: str) -> str | None:
        """Publish one client frame; returns an error string instead of raising."""
        try:
            obj = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            return f"invalid json: {e}"
        if not isinstance(obj, dict):
            return "message must be a JSON object"
        topic = obj.get("topic")
        payload = obj.get("payload")
        if not isinstance(topic, str):
            return "missing or invalid 'topic'"
        if not isinstance(payload, dict):
            return "missing or invalid 'payload'"
        try:
            self.bus.publish(topic, payload, publisher=client_id)
        except UnknownTopic:
            return f"unknown topic {topic!r}"
        except SchemaMismatch as e:
            return f"schema mismatch: {e}"
        return None
