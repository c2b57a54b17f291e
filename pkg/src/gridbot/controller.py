"""Closed-loop step controller: per-motor pulse loops plus the cross-motor
comparator that counterbalances the lagging wheel.

Each step command is executed as its own closed loop on encoder pulses
(1 step = 1 wheel revolution).  Per wheel, duty is proportional to the
remaining pulse deficit, capped at duty_max; the comparator then transfers
a boost from the wheel that is ahead to the wheel that has skipped more
pulses, so positive and negative offsets stay balanced.  A wheel brakes
the moment its deficit reaches the settle tolerance; braking is instant
(H-bridge short), which is what lets the loop land on the exact pulse
target that an uncorrected burst overshoots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .drive import DriveSim, MotorCommand, WheelDirection
from .kinematics import WheelSpec
from .planner import Action


class InvalidCommand(ValueError):
    pass


class SettleTimeout(RuntimeError):
    """Loop did not settle within max_ticks; the partial report rides along."""

    def __init__(self, report: "StepReport"):
        self.report = report
        super().__init__(f"step did not settle within {report.ticks} ticks")


@dataclass(frozen=True)
class StepCommand:
    action: Action
    steps: int = 1

    def __post_init__(self):
        if self.action is not Action.STOP and self.steps < 1:
            raise InvalidCommand(f"steps must be >= 1 for {self.action.value}, got {self.steps}")
        if self.steps < 0:
            raise InvalidCommand("steps must be >= 0")


@dataclass(frozen=True)
class ControllerParams:
    """First-order (proportional) loop constants.

    settle_tolerance is 0 by default: with duty_min sized well below one
    pulse per tick near settle, the plant cannot overshoot the target, so
    driving the deficit all the way to zero is what makes a noiseless step
    land on exactly steps * pulses_per_rev counts.
    """

    kp: float = 1.0 / 440.0       # duty per pulse of deficit
    kc: float = 0.5 / 440.0       # comparator duty per pulse of inter-wheel gap
    duty_min: float = 0.05
    duty_max: float = 1.0
    settle_tolerance: int = 0     # pulses
    max_ticks: int = 10_000
    dt: float = 1e-3


@dataclass
class LoopState:
    """Per-wheel pulse targets and running deficits for one step command."""

    target_l: int
    target_r: int
    base_l: int
    base_r: int
    counted_l: int = 0
    counted_r: int = 0
    delta_l: int = 0
    delta_r: int = 0
    settled: bool = False
    ticks: int = 0
    # Command memo: control output only changes when a pulse lands.
    _cached: MotorCommand | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.delta_l = self.target_l
        self.delta_r = self.target_r


@dataclass(frozen=True)
class StepReport:
    """Outcome of one executed step; doubles as the bus acknowledgement payload."""

    action: Action
    steps: int
    pulse_error_l: int
    pulse_error_r: int
    ticks: int
    ok: bool
    distance_error_in: float

    def ack_payload(self) -> dict:
        return {
            "pulse_error_l": self.pulse_error_l,
            "pulse_error_r": self.pulse_error_r,
            "ticks": self.ticks,
            "ok": self.ok,
        }


def turn_pulse_target(spec: WheelSpec) -> int:
    """Pulses per wheel for one in-place 90-degree turn.

    Each wheel sweeps a quarter of the circle of diameter wheel_base, so
    arc length is pi * wheel_base / 4, rounded to the nearest pulse.
    """
    arc = math.pi * spec.wheel_base / 4.0
    return round(arc / spec.inches_per_rev * spec.pulses_per_rev)


def begin_step(cmd: StepCommand, spec: WheelSpec, encoders: tuple[int, int]) -> LoopState:
    """Signed per-wheel pulse targets for a step command.

    Turn signs follow the map frame: RIGHT (East-to-South) needs omega > 0,
    i.e. right wheel forward and left wheel reversed.
    """
    n = cmd.steps * spec.pulses_per_rev
    q = cmd.steps * turn_pulse_target(spec)
    if cmd.action is Action.FORWARD:
        targets = (n, n)
    elif cmd.action is Action.BACK:
        targets = (-n, -n)
    elif cmd.action is Action.RIGHT:
        targets = (-q, q)
    elif cmd.action is Action.LEFT:
        targets = (q, -q)
    elif cmd.action is Action.STOP:
        targets = (0, 0)
    else:
        raise InvalidCommand(f"unknown action {cmd.action!r}")
    return LoopState(targets[0], targets[1], encoders[0], encoders[1])


def _duty_pair(
    rem_lag: int, rem_lead: int, gap: int, params: ControllerParams
) -> tuple[float, float]:
    """Duties (lagging, leading): proportional base capped first, then the
    comparator transfer, so the laggard is strictly favored even at the caps."""
    boost = params.kc * gap
    base_lag = min(params.kp * rem_lag, params.duty_max)
    base_lead = min(params.kp * rem_lead, params.duty_max)
    duty_lag = min(max(base_lag + boost, params.duty_min), params.duty_max)
    duty_lead = min(max(base_lead - boost, 0.0), params.duty_max)
    return duty_lag, duty_lead


def control_tick(
    ls: LoopState, encoders: tuple[int, int], params: ControllerParams
) -> MotorCommand:
    """One comparator-coupled proportional update; mutates ls, returns the command."""
    counted_l = encoders[0] - ls.base_l
    counted_r = encoders[1] - ls.base_r
    if ls._cached is not None and counted_l == ls.counted_l and counted_r == ls.counted_r:
        return ls._cached
    ls.counted_l = counted_l
    ls.counted_r = counted_r
    ls.delta_l = ls.target_l - ls.counted_l
    ls.delta_r = ls.target_r - ls.counted_r

    sign_l = 1 if ls.target_l >= 0 else -1
    sign_r = 1 if ls.target_r >= 0 else -1
    prog_l = sign_l * ls.counted_l
    prog_r = sign_r * ls.counted_r
    rem_l = abs(ls.target_l) - prog_l
    rem_r = abs(ls.target_r) - prog_r
    done_l = rem_l <= params.settle_tolerance
    done_r = rem_r <= params.settle_tolerance
    ls.settled = done_l and done_r

    if ls.settled:
        return MotorCommand.brake()

    duty_l = duty_r = 0.0
    if done_l or done_r:
        # Only one wheel still running: plain proportional on it.
        if not done_l:
            duty_l = min(max(params.kp * rem_l, params.duty_min), params.duty_max)
        if not done_r:
            duty_r = min(max(params.kp * rem_r, params.duty_min), params.duty_max)
    elif prog_l == prog_r:
        duty_l = min(max(params.kp * rem_l, params.duty_min), params.duty_max)
        duty_r = min(max(params.kp * rem_r, params.duty_min), params.duty_max)
    elif prog_l < prog_r:
        # Left has skipped more pulses: counterbalance in its favor.
        duty_l, duty_r = _duty_pair(rem_l, rem_r, prog_r - prog_l, params)
    else:
        duty_r, duty_l = _duty_pair(rem_r, rem_l, prog_l - prog_r, params)

    dir_l = WheelDirection.BRAKE if done_l else (
        WheelDirection.FORWARD if sign_l > 0 else WheelDirection.REVERSE
    )
    dir_r = WheelDirection.BRAKE if done_r else (
        WheelDirection.FORWARD if sign_r > 0 else WheelDirection.REVERSE
    )
    cmd = MotorCommand(
        dir_l, dir_r, duty_l if not done_l else 0.0, duty_r if not done_r else 0.0
    )
    ls._cached = cmd
    return cmd


def run_step(
    cmd: StepCommand, sim: DriveSim, params: ControllerParams | None = None
) -> StepReport:
    """Execute one step command closed-loop against the simulator.

    Loops control_tick + plant tick until settled; raises SettleTimeout
    (with the partial report attached) after max_ticks.
    """
    params = params or ControllerParams()
    pose0 = sim.pose
    ls = begin_step(cmd, sim.spec, sim.read_encoders())

    applied: MotorCommand | None = None
    while True:
        motor = control_tick(ls, sim.read_encoders(), params)
        if motor is not applied:
            sim.apply_command(motor)
            applied = motor
        if ls.settled:
            break
        if ls.ticks >= params.max_ticks:
            sim.apply_command(MotorCommand.brake())
            break
        sim.tick(params.dt)
        ls.ticks += 1

    nominal = (
        cmd.steps * sim.spec.inches_per_rev
        if cmd.action in (Action.FORWARD, Action.BACK)
        else 0.0
    )
    moved = math.hypot(sim.pose.x - pose0.x, sim.pose.y - pose0.y)
    report = StepReport(
        action=cmd.action,
        steps=cmd.steps,
        pulse_error_l=ls.delta_l,
        pulse_error_r=ls.delta_r,
        ticks=ls.ticks,
        ok=ls.settled,
        distance_error_in=abs(moved - nominal),
    )
    if not ls.settled:
        raise SettleTimeout(report)
    return report
