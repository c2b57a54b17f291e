"""Three-station wiring: host planner -> bridge relay -> drive controller.

The host plans and publishes one step command at a time, gated on the
previous acknowledgement (never more than one unacked command in flight).
The bridge relays commands to the controller over a framed serial-style
link and republishes the controller's pose/ack frames onto the bus.  The
controller owns the drive simulator and executes each command closed-loop.

The bridge<->controller link runs either in-process or over a localhost
TCP socket; both carry the same newline-delimited frames, so traces are
identical (excluding timestamps) for identical seeds.
"""

from __future__ import annotations

import math
import queue
import select
import socket
import threading
import time
from dataclasses import dataclass, field

from .bus import Bus, BusMessage, QueueSubscriber, frame_decode, frame_encode
from .controller import ControllerParams, SettleTimeout, StepCommand, run_step
from .drive import DEFAULT_MAX_SPEED, DriveSim, NoiseParams
from .grid import Cell, GridMap, cell_to_world
from .kinematics import Pose, WheelSpec
from .planner import Action, Heading, HeuristicKind, astar, path_to_actions
from .topics import grid_to_payload, make_bus, payload_to_grid, pose_to_payload

# Map-frame heading angles: East is +x (columns), South is +y (rows).
HEADING_THETA = {
    Heading.NORTH: -math.pi / 2,
    Heading.EAST: 0.0,
    Heading.SOUTH: math.pi / 2,
    Heading.WEST: math.pi,
}


class LinkClosed(Exception):
    pass


class AckTimeout(RuntimeError):
    """No acknowledgement within the configured timeout; partial report attached."""

    def __init__(self, report: "EpisodeReport"):
        self.report = report
        super().__init__("no acknowledgement within timeout")


class InprocEndpoint:
    """One end of an in-memory framed link; bytes still pass through the codec."""

    def __init__(self, pacing_bps: float | None = None):
        self._rx: queue.SimpleQueue = queue.SimpleQueue()
        self._peer: InprocEndpoint | None = None
        self._pacing = pacing_bps
        self._closed = False

    def send(self, msg: BusMessage):
        if self._closed or self._peer is None:
            return
        frame = frame_encode(msg)
        if self._pacing:
            time.sleep(len(frame) / self._pacing)
        self._peer._rx.put(frame)

    def recv(self, timeout: float) -> BusMessage | None:
        try:
            frame = self._rx.get(timeout=timeout)
        except queue.Empty:
            return None
        if frame is None:
            raise LinkClosed
        return frame_decode(frame)

    def close(self):
        self._closed = True
        if self._peer is not None:
            self._peer._rx.put(None)


class TcpEndpoint:
    """One end of a localhost TCP link carrying newline-delimited frames.

    Reads go through an explicit buffer driven by select, never a buffered
    file with a socket timeout (a timeout mid-line would lose bytes).
    """

    def __init__(self, sock: socket.socket, pacing_bps: float | None = None):
        self._sock = sock
        self._buf = bytearray()
        self._pacing = pacing_bps
        self._lock = threading.Lock()
        self._closed = False

    def send(self, msg: BusMessage):
        frame = frame_encode(msg)
        if self._pacing:
            time.sleep(len(frame) / self._pacing)
        with self._lock:
            if self._closed:
                return
            try:
                self._sock.sendall(frame)
            except OSError:
                self._closed = True

    def recv(self, timeout: float) -> BusMessage | None:
        """Next frame within timeout, else None; timeout 0 polls without blocking."""
        deadline = time.monotonic() + timeout
        while True:
            newline = self._buf.find(b"\n")
            if newline >= 0:
                line = bytes(self._buf[: newline + 1])
                del self._buf[: newline + 1]
                return frame_decode(line)
            remaining = max(0.0, deadline - time.monotonic())
            try:
                ready, _, _ = select.select([self._sock], [], [], remaining)
            except (OSError, ValueError):
                raise LinkClosed from None
            if not ready:
                return None
            try:
                chunk = self._sock.recv(65536)
            except OSError:
                raise LinkClosed from None
            if not chunk:
                raise LinkClosed
            self._buf.extend(chunk)

    def close(self):
        with self._lock:
            self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def make_link(transport: str = "inproc", pacing_bps: float | None = None):
    """(bridge_end, controller_end) pair for the chosen transport."""
    if transport == "inproc":
        a = InprocEndpoint(pacing_bps)
        b = InprocEndpoint(pacing_bps)
        a._peer, b._peer = b, a
        return a, b
    if transport == "tcp":
        listener = socket.create_server(("127.0.0.1", 0))
        port = listener.getsockname()[1]
        client = socket.create_connection(("127.0.0.1", port))
        server, _ = listener.accept()
        listener.close()
        for s in (client, server):
            s.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        return TcpEndpoint(client, pacing_bps), TcpEndpoint(server, pacing_bps)
    raise ValueError(f"unknown transport {transport!r}")


class ControllerStation(threading.Thread):
    """Low-level station: executes step commands against its drive simulator.

    Talks only over the framed link: /drive/cmd and /drive/reset in,
    /pose and /drive/ack out.
    """

    def __init__(self, endpoint, sim: DriveSim, params: ControllerParams | None = None):
        super().__init__(name="controller-station", daemon=True)
        self.endpoint = endpoint
        self.sim = sim
        self.params = params or ControllerParams()
        self._halt = threading.Event()
        self._seq: dict[str, int] = {}

    def _send(self, topic: str, payload: dict):
        seq = self._seq.get(topic, 0) + 1
        self._seq[topic] = seq
        self.endpoint.send(BusMessage(topic, seq, payload))

    def _send_pose(self):
        self._send("/pose", pose_to_payload(self.sim.pose, self.sim.spec))

    def run(self):
        self._send_pose()  # announce the starting pose
        while not self._halt.is_set():
            try:
                msg = self.endpoint.recv(0.05)
            except LinkClosed:
                break
            if msg is None:
                continue
            if msg.topic == "/drive/cmd":
                self._execute(msg.payload)
            elif msg.topic == "/drive/reset":
                p = msg.payload
                self.sim.reset(Pose(p["x_in"], p["y_in"], p["theta_rad"]))
                self._send_pose()

    def _execute(self, payload: dict):
        cmd = StepCommand(Action(payload["action"]), payload.get("steps", 1))
        try:
            report = run_step(cmd, self.sim, self.params)
        except SettleTimeout as e:
            report = e.report
        self._send_pose()
        self._send("/drive/ack", report.ack_payload())

    def stop(self):
        self._halt.set()


class BridgeStation(threading.Thread):
    """Middle station (the OBC role): bus on one side, serial link on the other.

    Relays /plan/actions and foreign /drive/cmd publications down the link
    one at a time, republishes controller frames, and answers each planned
    command with /plan/ack once the controller has acknowledged it.

    Bus messages and link frames merge into one inbox (a pump thread reads
    the link), so the station always blocks on a single queue; bus commands
    that arrive while a relay is awaiting its ack are deferred in order.
    """

    def __init__(self, bus: Bus, endpoint, publisher: str = "bridge", poll: float = 0.05):
        super().__init__(name="bridge-station", daemon=True)
        self.bus = bus
        self.endpoint = endpoint
        self.publisher = publisher
        self.poll = poll
        self._halt = threading.Event()
        self._seq = 0
        self._inbox: queue.SimpleQueue = queue.SimpleQueue()
        self._deferred: list[BusMessage] = []

        def on_bus(msg: BusMessage):
            self._inbox.put(("bus", msg))

        def on_foreign_cmd(msg: BusMessage):
            if msg.publisher != publisher:
                self._inbox.put(("bus", msg))

        self._subs = [
            bus.subscribe("/plan/actions", on_bus),
            bus.subscribe("/drive/cmd", on_foreign_cmd),
            bus.subscribe("/drive/reset", on_bus),
        ]

    def _pump(self):
        while not self._halt.is_set():
            try:
                frame = self.endpoint.recv(0.5)
            except LinkClosed:
                self._inbox.put(("closed", None))
                return
            if frame is not None:
                self._inbox.put(("frame", frame))

    def run(self):
        pump = threading.Thread(name="bridge-link-pump", target=self._pump, daemon=True)
        pump.start()
        try:
            while not self._halt.is_set():
                if self._deferred:
                    self._handle(self._deferred.pop(0))
                    continue
                try:
                    kind, msg = self._inbox.get(timeout=self.poll)
                except queue.Empty:
                    continue
                if kind == "closed":
                    break
                if kind == "frame":
                    # Unsolicited controller traffic (startup / reset poses).
                    self.bus.publish(msg.topic, msg.payload, self.publisher)
                else:
                    self._handle(msg)
        except LinkClosed:
            pass
        finally:
            pump.join(timeout=2.0)

    def _send_frame(self, topic: str, payload: dict):
        self._seq += 1
        self.endpoint.send(BusMessage(topic, self._seq, payload))

    def _handle(self, msg: BusMessage):
        if msg.topic == "/drive/reset":
            self._send_frame("/drive/reset", msg.payload)
            self._await(until="/pose")
        elif msg.topic == "/plan/actions":
            # Republish for observability, then relay and gate on the ack.
            self.bus.publish("/drive/cmd", msg.payload, self.publisher)
            self._send_frame("/drive/cmd", msg.payload)
            self._await(until="/drive/ack", plan_seq=msg.seq)
        elif msg.topic == "/drive/cmd":
            self._send_frame("/drive/cmd", msg.payload)
            self._await(until="/drive/ack")

    def _await(self, until: str, plan_seq: int | None = None):
        while not self._halt.is_set():
            try:
                kind, msg = self._inbox.get(timeout=self.poll)
            except queue.Empty:
                continue
            if kind == "closed":
                raise LinkClosed
            if kind == "bus":
                self._deferred.append(msg)  # next relay, after this ack
                continue
            self.bus.publish(msg.topic, msg.payload, self.publisher)
            if msg.topic == until:
                if plan_seq is not None:
                    self.bus.publish("/plan/ack", {"seq_of_cmd": plan_seq}, self.publisher)
                return

    def stop(self):
        self._halt.set()
        for sub in self._subs:
            self.bus.unsubscribe(sub)


class Recorder:
    """Subscribe-all trace of every bus message, in delivery order."""

    def __init__(self, bus: Bus):
        self.messages: list[dict] = []
        bus.subscribe(None, self._on_message)

    def _on_message(self, msg: BusMessage):
        self.messages.append(
            {
                "topic": msg.topic,
                "seq": msg.seq,
                "publisher": msg.publisher,
                "payload": msg.payload,
                "t": time.time(),
            }
        )


@dataclass
class EpisodeReport:
    """Full episode outcome: message trace, final pose, success flag."""

    success: bool
    goal: tuple[int, int]
    error: str | None = None
    planned_path: list[tuple[int, int]] = field(default_factory=list)
    planned_cost: int = -1
    actions: list[str] = field(default_factory=list)
    final_pose: dict | None = None
    final_cell: tuple[int, int] | None = None
    messages: list[dict] = field(default_factory=list)

    def executed_cells(self) -> list[tuple[int, int]]:
        """Cell sequence actually visited, from /pose messages, deduped consecutively."""
        cells: list[tuple[int, int]] = []
        for m in self.messages:
            if m["topic"] == "/pose":
                cell = tuple(m["payload"]["cell"])
                if not cells or cells[-1] != cell:
                    cells.append(cell)
        return cells

    def to_json(self, include_timing: bool = True) -> dict:
        messages = self.messages
        if not include_timing:
            messages = [{**m, "t": 0.0} for m in messages]
        return {
            "success": self.success,
            "error": self.error,
            "goal": list(self.goal),
            "planned_path": [list(c) for c in self.planned_path],
            "planned_cost": self.planned_cost,
            "actions": self.actions,
            "final_pose": self.final_pose,
            "final_cell": list(self.final_cell) if self.final_cell else None,
            "messages": messages,
        }


def validate_ack_gating(messages: list[dict]) -> bool:
    """Exactly one /drive/ack between consecutive /plan/actions messages."""
    acks_since_cmd = None
    for m in messages:
        if m["topic"] == "/plan/actions":
            if acks_since_cmd is not None and acks_since_cmd != 1:
                return False
            acks_since_cmd = 0
        elif m["topic"] == "/drive/ack" and acks_since_cmd is not None:
            acks_since_cmd += 1
    return acks_since_cmd is None or acks_since_cmd == 1


def start_pose(grid: GridMap, spec: WheelSpec, heading: Heading) -> Pose:
    x, y = cell_to_world(grid.start, spec.inches_per_rev)
    return Pose(x, y, HEADING_THETA[heading])


class _AckWaiter:
    """Host-side ack-gated dispatcher for /plan/actions."""

    def __init__(self, bus: Bus, publisher: str = "host"):
        self.bus = bus
        self.publisher = publisher
        self._acks: queue.SimpleQueue = queue.SimpleQueue()
        bus.subscribe("/plan/ack", QueueSubscriber(self._acks))

    def dispatch(self, action: Action, steps: int, timeout: float):
        seq = self.bus.publish(
            "/plan/actions", {"action": action.value, "steps": steps}, self.publisher
        )
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TimeoutError
            try:
                ack = self._acks.get(timeout=remaining)
            except queue.Empty:
                raise TimeoutError from None
            if ack.payload["seq_of_cmd"] == seq:
                return


def run_episode(
    grid: GridMap,
    heuristic: HeuristicKind = HeuristicKind.MANHATTAN,
    noise: NoiseParams | None = None,
    seed: int = 0,
    transport: str = "inproc",
    pacing_bps: float | None = None,
    ack_timeout: float = 10.0,
    params: ControllerParams | None = None,
    spec: WheelSpec | None = None,
    max_speed: float = DEFAULT_MAX_SPEED,
    initial_heading: Heading = Heading.EAST,
) -> EpisodeReport:
    """Plan on the host, execute step-by-step through bridge and controller.

    Raises AckTimeout (with the partial report attached) when an
    acknowledgement does not arrive in time.
    """
    spec = spec or WheelSpec()
    noise = noise if noise is not None else NoiseParams()
    plan = astar(grid, heuristic)
    goal = (grid.goal.row, grid.goal.col)
    if not plan.found:
        return EpisodeReport(success=False, goal=goal, error="no_path")

    actions = path_to_actions(plan.path, initial_heading)
    report = EpisodeReport(
        success=False,
        goal=goal,
        planned_path=[(c.row, c.col) for c in plan.path],
        planned_cost=plan.cost,
        actions=[a.value for a in actions],
    )

    bus = make_bus()
    recorder = Recorder(bus)
    pose_box: queue.SimpleQueue = queue.SimpleQueue()
    bus.subscribe("/pose", QueueSubscriber(pose_box))
    waiter = _AckWaiter(bus)

    bridge_end, ctrl_end = make_link(transport, pacing_bps)
    sim = DriveSim(spec, noise, seed, start_pose(grid, spec, initial_heading), max_speed)
    controller = ControllerStation(ctrl_end, sim, params)
    bridge = BridgeStation(bus, bridge_end)

    controller.start()
    bridge.start()
    try:
        try:
            pose_box.get(timeout=ack_timeout)  # controller announced itself
        except queue.Empty:
            report.error = "ack_timeout"
            report.messages = recorder.messages
            raise AckTimeout(report) from None
        bus.publish("/map", grid_to_payload(grid), "host")
        for action in actions:
            steps = 0 if action is Action.STOP else 1
            try:
                waiter.dispatch(action, steps, ack_timeout)
            except TimeoutError:
                report.error = "ack_timeout"
                report.messages = recorder.messages
                raise AckTimeout(report) from None
    finally:
        controller.stop()
        bridge.stop()
        ctrl_end.close()
        bridge_end.close()
        for station in (controller, bridge):
            if station.ident is not None:
                station.join(timeout=5.0)

    report.messages = recorder.messages
    poses = [m for m in report.messages if m["topic"] == "/pose"]
    if poses:
        report.final_pose = poses[-1]["payload"]
        report.final_cell = tuple(report.final_pose["cell"])
    report.success = report.final_cell == goal
    return report


class ServeApp:
    """Long-running deployment: stations plus host logic for interactive clients.

    The host side keeps the current map (updated by /map publications from
    clients), resets the robot to the new start cell on map changes, and
    runs plan-and-execute episodes on /plan/run requests.
    """

    def __init__(
        self,
        grid: GridMap,
        noise: NoiseParams | None = None,
        seed: int = 0,
        transport: str = "inproc",
        pacing_bps: float | None = None,
        params: ControllerParams | None = None,
        spec: WheelSpec | None = None,
        max_speed: float = DEFAULT_MAX_SPEED,
        heuristic: HeuristicKind = HeuristicKind.MANHATTAN,
        initial_heading: Heading = Heading.EAST,
        ack_timeout: float = 30.0,
    ):
        self.spec = spec or WheelSpec()
        self.grid = grid
        self.heuristic = heuristic
        self.initial_heading = initial_heading
        self.ack_timeout = ack_timeout
        self.bus = make_bus()
        self.recorder = Recorder(self.bus)
        self._pose_box: queue.SimpleQueue = queue.SimpleQueue()
        self.bus.subscribe("/pose", QueueSubscriber(self._pose_box))
        self._inbox: queue.SimpleQueue = queue.SimpleQueue()
        self.bus.subscribe("/map", QueueSubscriber(self._inbox, drop_publisher="host"))
        self.bus.subscribe("/plan/run", QueueSubscriber(self._inbox))
        self._waiter = _AckWaiter(self.bus)

        bridge_end, ctrl_end = make_link(transport, pacing_bps)
        self._endpoints = (bridge_end, ctrl_end)
        sim = DriveSim(
            self.spec,
            noise if noise is not None else NoiseParams(),
            seed,
            start_pose(grid, self.spec, initial_heading),
            max_speed,
        )
        self.controller = ControllerStation(ctrl_end, sim, params)
        self.bridge = BridgeStation(self.bus, bridge_end)
        self._halt = threading.Event()
        self._worker = threading.Thread(name="serve-host", target=self._work, daemon=True)

    def start(self):
        self.controller.start()
        self.bridge.start()
        self._pose_box.get(timeout=self.ack_timeout)
        self.bus.publish("/map", grid_to_payload(self.grid), "host")
        self._worker.start()

    def stop(self):
        self._halt.set()
        self.controller.stop()
        self.bridge.stop()
        for ep in self._endpoints:
            ep.close()
        for t in (self.controller, self.bridge, self._worker):
            if t.ident is not None:
                t.join(timeout=5.0)

    def _work(self):
        while not self._halt.is_set():
            try:
                msg = self._inbox.get(timeout=0.05)
            except queue.Empty:
                continue
            if msg.topic == "/map":
                self._on_map_edit(msg.payload)
            elif msg.topic == "/plan/run":
                self._on_plan_run(msg.payload)

    def _on_map_edit(self, payload: dict):
        self.grid = payload_to_grid(payload)
        pose = start_pose(self.grid, self.spec, self.initial_heading)
        self.bus.publish(
            "/drive/reset",
            {"x_in": pose.x, "y_in": pose.y, "theta_rad": pose.theta},
            "host",
        )

    def _on_plan_run(self, payload: dict):
        kind = HeuristicKind(payload.get("heuristic", self.heuristic.value))
        plan = astar(self.grid, kind)
        self.bus.publish(
            "/plan/result",
            {
                "found": plan.found,
                "cost": plan.cost,
                "path": [[c.row, c.col] for c in plan.path],
            },
            "host",
        )
        if not plan.found:
            return
        # Episodes always run from the map's start cell with a known heading;
        # the reset frame is relayed in order ahead of the first action.
        pose = start_pose(self.grid, self.spec, self.initial_heading)
        self.bus.publish(
            "/drive/reset",
            {"x_in": pose.x, "y_in": pose.y, "theta_rad": pose.theta},
            "host",
        )
        actions = path_to_actions(plan.path, self.initial_heading)
        for action in actions:
            if self._halt.is_set():
                return
            steps = 0 if action is Action.STOP else 1
            try:
                self._waiter.dispatch(action, steps, self.ack_timeout)
            except TimeoutError:
                return
