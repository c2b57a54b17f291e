"""Stochastic actuator + encoder simulator: the stand-in for H-bridge, motors,
and Hall-effect encoders.

Duty maps linearly to a wheel speed target (PWM treated as a velocity
throughput, no motor inertia).  Two noise mechanisms, both seeded:

* slip: per-tick multiplicative Gaussian on each wheel's speed, the
  wet-floor kind of inter-wheel divergence;
* coast tail: releasing a powered wheel to duty 0 (direction held, not
  BRAKE) lets it coast out a decaying tail whose length is drawn uniformly
  in [overshoot_lo, overshoot_hi] pulses at full speed and scales with the
  square of the speed at release.  This is what makes an uncorrected
  one-revolution burst overshoot by the calibrated +66..+190 pulses, while
  a feedback loop that brakes near target loses under a pulse.

BRAKE is an instant stop (H-bridge short), no coast.  Encoders are ideal
counters of effective wheel travel with fractional-pulse carry preserved
across ticks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from enum import Enum
from math import cos, sin

from .kinematics import OMEGA_STRAIGHT_THRESHOLD, Pose, WheelSpec, normalize_angle

DEFAULT_MAX_SPEED = 16.0  # in/s at duty 1.0 (2 revs/s); configuration, not a paper value


class WheelDirection(Enum):
    FORWARD = "FORWARD"
    REVERSE = "REVERSE"
    BRAKE = "BRAKE"


@dataclass(frozen=True)
class MotorCommand:
    """Per-wheel H-bridge command: direction plus PWM duty fraction."""

    left: WheelDirection
    right: WheelDirection
    duty_left: float
    duty_right: float

    def __post_init__(self):
        for duty in (self.duty_left, self.duty_right):
            if not 0.0 <= duty <= 1.0:
                raise ValueError(f"duty must be in [0, 1], got {duty}")

    @staticmethod
    def brake() -> "MotorCommand":
        return MotorCommand(WheelDirection.BRAKE, WheelDirection.BRAKE, 0.0, 0.0)

    @staticmethod
    def straight(duty: float, reverse: bool = False) -> "MotorCommand":
        d = WheelDirection.REVERSE if reverse else WheelDirection.FORWARD
        return MotorCommand(d, d, duty, duty)


@dataclass(frozen=True)
class NoiseParams:
    slip_sd: float = 0.05
    overshoot_lo: float = 66.0
    overshoot_hi: float = 190.0
    enabled: bool = True

    def __post_init__(self):
        if self.slip_sd < 0:
            raise ValueError("slip_sd must be >= 0")
        if not 0 <= self.overshoot_lo <= self.overshoot_hi:
            raise ValueError("need 0 <= overshoot_lo <= overshoot_hi")

    @staticmethod
    def off() -> "NoiseParams":
        return NoiseParams(enabled=False)

    def with_enabled(self, enabled: bool) -> "NoiseParams":
        return replace(self, enabled=enabled)


def _direction_sign(d: WheelDirection) -> float:
    if d is WheelDirection.FORWARD:
        return 1.0
    if d is WheelDirection.REVERSE:
        return -1.0
    return 0.0


class DriveSim:
    """Owns the drive state: pose, wheel targets, encoder counts, rng.

    tick() is exclusive to one logical clock owner; reading encoders
    between ticks is safe.
    """

    def __init__(
        self,
        spec: WheelSpec | None = None,
        noise: NoiseParams | None = None,
        seed: int = 0,
        pose: Pose | None = None,
        max_speed: float = DEFAULT_MAX_SPEED,
    ):
        self.spec = spec or WheelSpec()
        self.noise = noise if noise is not None else NoiseParams()
        self.max_speed = max_speed
        p = pose or Pose()
        self._x, self._y, self._theta = p.x, p.y, p.theta
        self.pulses_left = 0
        self.pulses_right = 0
        self.elapsed = 0.0
        self._rng = random.Random(seed)
        self._pulses_per_inch = self.spec.pulses_per_rev / self.spec.inches_per_rev
        self._inch_per_pulse = self.spec.inches_per_rev / self.spec.pulses_per_rev
        self._inv_base = 1.0 / self.spec.wheel_base
        self._target_l = 0.0
        self._target_r = 0.0
        self._carry_l = 0.0
        self._carry_r = 0.0
        self._coast_v_l = 0.0
        self._coast_v_r = 0.0
        self._decel_l = 0.0
        self._decel_r = 0.0

    @property
    def pose(self) -> Pose:
        return Pose(self._x, self._y, normalize_angle(self._theta))

    @pose.setter
    def pose(self, p: Pose):
        self._x, self._y, self._theta = p.x, p.y, p.theta

    @property
    def wheel_targets(self) -> tuple[float, float]:
        return (self._target_l, self._target_r)

    def reset(self, pose: Pose):
        """Reposition the robot and zero counters and motion state."""
        self.pose = pose
        self.pulses_left = self.pulses_right = 0
        self._carry_l = self._carry_r = 0.0
        self._target_l = self._target_r = 0.0
        self._coast_v_l = self._coast_v_r = 0.0
        self._decel_l = self._decel_r = 0.0

    def read_encoders(self) -> tuple[int, int]:
        """Cumulative signed pulse counts (left, right); pure read."""
        return (self.pulses_left, self.pulses_right)

    def apply_command(self, cmd: MotorCommand):
        """Set per-wheel speed targets; BRAKE stops instantly, release starts a coast."""
        new_l = _direction_sign(cmd.left) * cmd.duty_left * self.max_speed
        new_r = _direction_sign(cmd.right) * cmd.duty_right * self.max_speed
        # Left wheel first, then right: fixed rng draw order for determinism.
        self._coast_v_l, self._decel_l = self._wheel_transition(
            self._target_l, new_l, cmd.left, self._coast_v_l, self._decel_l
        )
        self._coast_v_r, self._decel_r = self._wheel_transition(
            self._target_r, new_r, cmd.right, self._coast_v_r, self._decel_r
        )
        self._target_l = new_l
        self._target_r = new_r

    def _wheel_transition(
        self,
        old_target: float,
        new_target: float,
        direction: WheelDirection,
        coast_v: float,
        decel: float,
    ) -> tuple[float, float]:
        if direction is WheelDirection.BRAKE or new_target != 0.0:
            return 0.0, 0.0  # brake kills any coast; a powered target overrides it
        if old_target == 0.0:
            return coast_v, decel  # released while already idle: keep coasting
        if not self.noise.enabled:
            return 0.0, 0.0
        # Release from speed: coast out (|v|/max_speed)^2 * U[lo, hi] pulses.
        overshoot = self._rng.uniform(self.noise.overshoot_lo, self.noise.overshoot_hi)
        scale = old_target / self.max_speed
        dist = scale * scale * overshoot * self._inch_per_pulse
        if dist <= 0.0:
            return 0.0, 0.0
        return old_target, old_target * old_target / (2.0 * dist)

    def _coast_step(self, coast_v: float, decel: float, dt: float) -> tuple[float, float]:
        """(mean speed over the tick, remaining coast speed) for a decaying tail."""
        sign = 1.0 if coast_v > 0 else -1.0
        speed = abs(coast_v)
        if speed <= decel * dt:
            return sign * speed * speed / (2.0 * decel) / dt, 0.0
        dist = speed * dt - 0.5 * decel * dt * dt
        return sign * dist / dt, sign * (speed - decel * dt)

    def tick(self, dt: float):
        """Advance the plant by dt seconds; deterministic given the seed.

        Hot loop: the ICC arc from kinematics.integrate_pose is inlined on
        raw floats; pose objects are only materialized on read.
        """
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        slip = self.noise.slip_sd if self.noise.enabled else 0.0

        eff_l = self._target_l
        if eff_l != 0.0:
            if slip > 0.0:
                eff_l *= 1.0 + self._rng.gauss(0.0, slip)
        elif self._coast_v_l != 0.0:
            eff_l, self._coast_v_l = self._coast_step(self._coast_v_l, self._decel_l, dt)

        eff_r = self._target_r
        if eff_r != 0.0:
            if slip > 0.0:
                eff_r *= 1.0 + self._rng.gauss(0.0, slip)
        elif self._coast_v_r != 0.0:
            eff_r, self._coast_v_r = self._coast_step(self._coast_v_r, self._decel_r, dt)

        if eff_l != 0.0 or eff_r != 0.0:
            v = (eff_r + eff_l) * 0.5
            omega = (eff_r - eff_l) * self._inv_base
            theta = self._theta
            if -OMEGA_STRAIGHT_THRESHOLD < omega < OMEGA_STRAIGHT_THRESHOLD:
                self._x += v * dt * cos(theta)
                self._y += v * dt * sin(theta)
            else:
                radius = v / omega
                theta1 = theta + omega * dt
                self._x += radius * (sin(theta1) - sin(theta))
                self._y += radius * (cos(theta) - cos(theta1))
                self._theta = theta1
            self._carry_l += eff_l * dt * self._pulses_per_inch
            self._carry_r += eff_r * dt * self._pulses_per_inch
            whole_l = int(self._carry_l)
            whole_r = int(self._carry_r)
            if whole_l:
                self.pulses_left += whole_l
                self._carry_l -= whole_l
            if whole_r:
                self.pulses_right += whole_r
                self._carry_r -= whole_r
        self.elapsed += dt

    def idle(self) -> bool:
        """True when no wheel is powered or coasting."""
        return (
            self._target_l == 0.0
            and self._target_r == 0.0
            and self._coast_v_l == 0.0
            and self._coast_v_r == 0.0
        )


def open_loop_step(sim: DriveSim, reverse: bool = False, dt: float = 1e-3) -> tuple[int, int]:
    """Drive one uncorrected step: a full-duty burst timed for one wheel
    revolution at nominal speed, then release and coast out.

    Returns the per-wheel pulse overshoot beyond the nominal
    pulses_per_rev, signed positive in the commanded direction.
    """
    start_l, start_r = sim.read_encoders()
    burst_ticks = max(1, round(sim.spec.inches_per_rev / sim.max_speed / dt))
    sim.apply_command(MotorCommand.straight(1.0, reverse=reverse))
    for _ in range(burst_ticks):
        sim.tick(dt)
    sim.apply_command(MotorCommand.straight(0.0, reverse=reverse))
    guard = int(60.0 / dt)
    while not sim.idle() and guard > 0:
        sim.tick(dt)
        guard -= 1
    end_l, end_r = sim.read_encoders()
    sign = -1 if reverse else 1
    nominal = sim.spec.pulses_per_rev
    return (
        sign * (end_l - start_l) - nominal,
        sign * (end_r - start_r) - nominal,
    )


def wheel_distance_inches(sim: DriveSim) -> tuple[float, float]:
    """Distance implied by the pulse counters plus fractional carry, per wheel."""
    ipp = sim.spec.inches_per_rev / sim.spec.pulses_per_rev
    return (
        (sim.pulses_left + sim._carry_l) * ipp,
        (sim.pulses_right + sim._carry_r) * ipp,
    )
