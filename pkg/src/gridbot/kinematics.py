"""Differential-drive model: angular velocity, motion cases, exact pose integration.

Frame convention: world x runs along grid columns, world y along grid rows
(row 0 at the top of the map), and heading theta is the standard math angle
over (x, y).  In this frame positive omega = (vr - vl) / wheel_base rotates
the heading from East toward South, i.e. a RIGHT turn on the map as drawn.

Pose integration is the closed-form arc about the instantaneous center of
curvature (ICC), not Euler stepping, so composition is exact and the
simulator tests can be tolerance-tight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Below this the arc radius v/omega overflows while the arc is analytically
# indistinguishable from a straight line at test tolerances.
OMEGA_STRAIGHT_THRESHOLD = 1e-9


class NonPositiveWheelBase(ValueError):
    pass


@dataclass(frozen=True)
class Pose:
    """Planar position in inches plus heading in radians, normalized to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class WheelSpec:
    wheel_base: float = 10.0       # inches between wheels
    inches_per_rev: float = 8.0    # 1 step = 1 wheel revolution = 8 inches
    pulses_per_rev: int = 440      # Hall-effect encoder pulses per revolution

    def __post_init__(self):
        if self.wheel_base <= 0:
            raise NonPositiveWheelBase(f"wheel_base must be > 0, got {self.wheel_base}")
        if self.inches_per_rev <= 0 or self.pulses_per_rev <= 0:
            raise ValueError("inches_per_rev and pulses_per_rev must be > 0")


class MotionCase(Enum):
    FORWARD = "FORWARD"
    BACK = "BACK"
    RIGHT = "RIGHT"
    LEFT = "LEFT"
    STOP = "STOP"
    ARC = "ARC"


class Unit(Enum):
    STEPS = "steps"
    REVS = "revs"
    PULSES = "pulses"
    INCHES = "inches"


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    elif t > math.pi:
        t -= 2.0 * math.pi
    return t


def angular_velocity(vr: float, vl: float, wheel_base: float) -> float:
    """omega = (vr - vl) / wheel_base; zero when both wheels run at equal speed."""
    if wheel_base <= 0:
        raise NonPositiveWheelBase(f"wheel_base must be > 0, got {wheel_base}")
    return (vr - vl) / wheel_base


def classify_motion(vr: float, vl: float) -> MotionCase:
    """Motion case for a (vr, vl) command pair; exact comparisons, total over the plane.

    The two spin cases are sign-disambiguated in the map frame: vr > 0 with
    vl = -vr gives omega > 0 (East-to-South), a RIGHT turn on the map.
    """
    if vr == 0 and vl == 0:
        return MotionCase.STOP
    if vr == vl:
        return MotionCase.FORWARD if vr > 0 else MotionCase.BACK
    if vr > 0 and vl == -vr:
        return MotionCase.RIGHT
    if vl > 0 and vr == -vl:
        return MotionCase.LEFT
    return MotionCase.ARC


def integrate_pose(p: Pose, vr: float, vl: float, dt: float, spec: WheelSpec) -> Pose:
    """Advance a pose by dt seconds at constant wheel speeds via the exact ICC arc."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return p
    v = (vr + vl) / 2.0
    omega = (vr - vl) / spec.wheel_base
    if abs(omega) < OMEGA_STRAIGHT_THRESHOLD:
        return Pose(
            p.x + v * dt * math.cos(p.theta),
            p.y + v * dt * math.sin(p.theta),
            p.theta,
        )
    # Rotate about the ICC at signed radius R = v / omega.
    radius = v / omega
    icc_x = p.x - radius * math.sin(p.theta)
    icc_y = p.y + radius * math.cos(p.theta)
    theta1 = p.theta + omega * dt
    return Pose(
        icc_x + radius * math.sin(theta1),
        icc_y - radius * math.cos(theta1),
        theta1,
    )


# Conversion family: 1 step = 1 rev; revs * pulses_per_rev = pulses;
# revs * inches_per_rev = inches.  All exact ratios through revs.

def convert(value: float, src: Unit, dst: Unit, spec: WheelSpec) -> float:
    revs = value
    if src is Unit.PULSES:
        revs = value / spec.pulses_per_rev
    elif src is Unit.INCHES:
        revs = value / spec.inches_per_rev
    if dst is Unit.PULSES:
        return revs * spec.pulses_per_rev
    if dst is Unit.INCHES:
        return revs * spec.inches_per_rev
    return revs


def pulses_to_inches(pulses: float, spec: WheelSpec) -> float:
    return pulses * spec.inches_per_rev / spec.pulses_per_rev


def inches_to_pulses(inches: float, spec: WheelSpec) -> float:
    return inches * spec.pulses_per_rev / spec.inches_per_rev


def steps_to_pulses(steps: float, spec: WheelSpec) -> float:
    return steps * spec.pulses_per_rev


def steps_to_inches(steps: float, spec: WheelSpec) -> float:
    return steps * spec.inches_per_rev
