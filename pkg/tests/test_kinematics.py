import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridbot.kinematics import (
    MotionCase,
    NonPositiveWheelBase,
    Pose,
    Unit,
    WheelSpec,
    angular_velocity,
    classify_motion,
    convert,
    inches_to_pulses,
    integrate_pose,
    normalize_angle,
    pulses_to_inches,
    steps_to_inches,
    steps_to_pulses,
)

SPEC = WheelSpec()


def substep_integrate(p: Pose, vr: float, vl: float, dt: float, spec: WheelSpec, substeps: int) -> Pose:
    """Independent oracle: fine-grained midpoint stepping of the same model.

    First-order stepping at 1e4 substeps carries O(1e-4 in) truncation
    error on tight arcs; evaluating the heading at the substep midpoint is
    the cheapest scheme that actually resolves the 1e-6 tolerance.
    """
    x, y, theta = p.x, p.y, p.theta
    v = (vr + vl) / 2.0
    omega = (vr - vl) / spec.wheel_base
    h = dt / substeps
    for _ in range(substeps):
        mid = theta + omega * h / 2.0
        x += v * h * math.cos(mid)
        y += v * h * math.sin(mid)
        theta += omega * h
    return Pose(x, y, theta)


class TestAngularVelocity:
    def test_equal_speeds_zero_omega(self):
        assert angular_velocity(5.0, 5.0, 10.0) == 0.0

    def test_unit_substitution(self):
        assert angular_velocity(0.5, -0.5, 1.0) == 1.0

    def test_fraction(self):
        assert angular_velocity(2.0, 1.0, 10.0) == pytest.approx(0.1)

    def test_nonpositive_wheel_base(self):
        with pytest.raises(NonPositiveWheelBase):
            angular_velocity(1.0, 1.0, 0.0)

    @given(
        st.floats(-20, 20, allow_nan=False),
        st.floats(-20, 20, allow_nan=False),
    )
    @settings(max_examples=80)
    def test_antisymmetric(self, vr, vl):
        assert angular_velocity(vr, vl, 10.0) == -angular_velocity(vl, vr, 10.0)


class TestClassifyMotion:
    def test_forward(self):
        assert classify_motion(3, 3) is MotionCase.FORWARD

    def test_stop(self):
        assert classify_motion(0, 0) is MotionCase.STOP

    def test_back(self):
        assert classify_motion(-2, -2) is MotionCase.BACK

    def test_arc(self):
        assert classify_motion(2, 1) is MotionCase.ARC

    def test_spin_right_has_positive_omega(self):
        # Map frame: omega > 0 turns East toward South, a right turn.
        assert classify_motion(4, -4) is MotionCase.RIGHT
        assert angular_velocity(4, -4, 10.0) > 0

    def test_spin_left_has_negative_omega(self):
        assert classify_motion(-4, 4) is MotionCase.LEFT
        assert angular_velocity(-4, 4, 10.0) < 0

    @given(
        st.one_of(st.floats(-16, 16, allow_nan=False), st.sampled_from([0.0, 1.0, -1.0])),
        st.one_of(st.floats(-16, 16, allow_nan=False), st.sampled_from([0.0, 1.0, -1.0])),
    )
    @settings(max_examples=200)
    def test_total_and_deterministic(self, vr, vl):
        case = classify_motion(vr, vl)
        assert case in MotionCase
        assert classify_motion(vr, vl) is case


class TestIntegratePose:
    def test_straight_one_revolution(self):
        p = integrate_pose(Pose(), 8.0, 8.0, 1.0, SPEC)
        assert (p.x, p.y, p.theta) == (8.0, 0.0, 0.0)

    def test_spin_in_place_keeps_position(self):
        p = integrate_pose(Pose(), 2.0, -2.0, 0.7, SPEC)
        assert abs(p.x) < 1e-9 and abs(p.y) < 1e-9
        assert p.theta == pytest.approx(angular_velocity(2.0, -2.0, SPEC.wheel_base) * 0.7)

    def test_full_circle_returns_home(self):
        spec = WheelSpec(wheel_base=1.0)
        p = integrate_pose(Pose(), 2 * math.pi * 1.5, 2 * math.pi * 0.5, 1.0, spec)
        assert abs(p.x) < 1e-6 and abs(p.y) < 1e-6
        assert abs(p.theta) < 1e-9  # normalized back to ~0 after 2*pi

    def test_matches_substep_oracle(self):
        # 1e4-substep numeric integration agrees within 1e-6 inches over 1 s.
        cases = [(8.0, 8.0), (16.0, 12.0), (5.0, -5.0), (-10.0, -6.0), (16.0, 15.9)]
        for vr, vl in cases:
            start = Pose(1.0, -2.0, 0.3)
            exact = integrate_pose(start, vr, vl, 1.0, SPEC)
            approx = substep_integrate(start, vr, vl, 1.0, SPEC, 10_000)
            assert math.hypot(exact.x - approx.x, exact.y - approx.y) < 1e-6, (vr, vl)

    def test_composition_exact(self):
        for vr, vl in ((8.0, 8.0), (6.0, -6.0), (12.0, 4.0)):
            one = integrate_pose(Pose(), vr, vl, 0.75, SPEC)
            two = integrate_pose(integrate_pose(Pose(), vr, vl, 0.5, SPEC), vr, vl, 0.25, SPEC)
            assert abs(one.x - two.x) < 1e-9
            assert abs(one.y - two.y) < 1e-9
            assert abs(normalize_angle(one.theta - two.theta)) < 1e-9

    def test_negative_dt_rejected(self):
        with pytest.raises(ValueError):
            integrate_pose(Pose(), 1.0, 1.0, -0.1, SPEC)

    def test_zero_dt_identity(self):
        p = Pose(3.0, 4.0, 1.0)
        assert integrate_pose(p, 9.0, 3.0, 0.0, SPEC) == p


class TestNormalizeAngle:
    @given(st.floats(-1000, 1000, allow_nan=False))
    @settings(max_examples=200)
    def test_range_and_equivalence(self, theta):
        t = normalize_angle(theta)
        assert -math.pi < t <= math.pi
        assert math.isclose(math.sin(t), math.sin(theta), abs_tol=1e-9)
        assert math.isclose(math.cos(t), math.cos(theta), abs_tol=1e-9)

    def test_boundary_maps_to_positive_pi(self):
        assert normalize_angle(math.pi) == math.pi
        assert normalize_angle(-math.pi) == math.pi


class TestUnits:
    def test_one_step_is_440_pulses(self):
        assert steps_to_pulses(1, SPEC) == 440

    def test_three_steps_is_24_inches(self):
        assert steps_to_inches(3, SPEC) == 24.0

    def test_zero_pulses_zero_inches(self):
        assert pulses_to_inches(0, SPEC) == 0.0

    def test_convert_round_trips(self):
        for src in Unit:
            for dst in Unit:
                assert convert(convert(7.0, src, dst, SPEC), dst, src, SPEC) == pytest.approx(7.0)

    def test_steps_and_revs_are_synonyms(self):
        assert convert(2.5, Unit.STEPS, Unit.PULSES, SPEC) == convert(
            2.5, Unit.REVS, Unit.PULSES, SPEC
        )

    def test_inches_to_pulses(self):
        assert inches_to_pulses(8.0, SPEC) == 440.0

    def test_spec_validation(self):
        with pytest.raises(NonPositiveWheelBase):
            WheelSpec(wheel_base=0)
        with pytest.raises(ValueError):
            WheelSpec(inches_per_rev=-1)


class TestPose:
    def test_theta_normalized_on_construction(self):
        assert Pose(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
