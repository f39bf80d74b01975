import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soarsim.dynamics import (
    AirframeParams,
    PidGains,
    PidState,
    RollAction,
    UavState,
    dynamics_step,
    pid_roll,
    predict_trajectory,
    roll_damping_moment,
    turn_radius,
    wrap_angle,
)


def kp_only(kp):
    return AirframeParams(pid=PidGains(kp=kp, ki=0.0, kd_gain=0.0))


class TestPidRoll:
    def test_zero_error_zero_integrator(self, airframe):
        assert pid_roll(airframe, 0.0, 0.02, PidState()) == 0.0

    def test_saturates_positive(self):
        af = kp_only(1000.0)
        assert pid_roll(af, 0.5, 0.02, PidState()) == 1.0
        assert pid_roll(af, -0.5, 0.02, PidState()) == -1.0

    def test_proportional_only(self):
        af = kp_only(1.0)
        assert pid_roll(af, 0.3, 0.02, PidState()) == pytest.approx(0.3)

    def test_integrator_antiwindup(self):
        af = AirframeParams(pid=PidGains(kp=0.0, ki=10.0, kd_gain=0.0, int_limit=0.3))
        state = PidState()
        for _ in range(200):
            pid_roll(af, 1.0, 0.02, state)
        assert state.integrator == pytest.approx(0.3)

    def test_rejects_bad_dt(self, airframe):
        with pytest.raises(ValueError):
            pid_roll(airframe, 0.1, 0.0, PidState())


class TestDynamicsStep:
    def test_straight_flight(self, airframe):
        s = UavState(0.0, 0.0, 9.0, 0.0, 0.0, 0.0, 100.0)
        out = dynamics_step(airframe, s, 0.0)
        assert (out.x, out.y) == (0.0, pytest.approx(0.18))
        assert out.psi == 0.0
        assert out.phi == 0.0
        assert out.phi_dot == 0.0

    def test_turn_rate_at_45_degrees(self, free_airframe):
        s = UavState(0.0, 0.0, 9.0, 0.0, math.radians(45.0), 0.0, 100.0)
        out = dynamics_step(free_airframe, s, math.radians(45.0))
        psi_dot = (out.psi - s.psi) / 0.02
        assert psi_dot == pytest.approx(9.80665 / 9.0, rel=1e-12)
        assert psi_dot == pytest.approx(1.08963, abs=1e-5)

    def test_roll_equilibrium(self, free_airframe):
        # aileron exactly cancelling the damping moment leaves phi_dot unchanged
        phi_dot = 1.0
        lp = roll_damping_moment(free_airframe, phi_dot, 9.0)
        needed = lp / free_airframe.k_a
        af = AirframeParams(stall_prevention=False, pid=PidGains(kp=1.0, ki=0.0, kd_gain=0.0))
        s = UavState(0.0, 0.0, 9.0, 0.0, 0.0, phi_dot, 100.0)
        out = dynamics_step(af, s, needed)  # error = needed, kp=1 -> aileron = needed
        assert out.phi_dot == pytest.approx(phi_dot, rel=1e-12)

    def test_never_non_finite_at_bank_stop(self, airframe):
        s = UavState(0.0, 0.0, 9.0, 0.0, math.radians(39.9), 5.0, 100.0)
        for _ in range(200):
            s = dynamics_step(airframe, s, math.radians(45.0))
        assert abs(s.phi) <= airframe.bank_limit + 1e-12
        assert math.isfinite(s.psi) and math.isfinite(s.x)

    def test_kinematics_energy_free(self, free_airframe):
        s = UavState(3.0, -2.0, 9.0, 0.4, 0.1, 0.2, 123.0)
        out = dynamics_step(free_airframe, s, 0.5)
        assert out.v == s.v
        assert out.h == s.h

    def test_invalid_state_rejected(self):
        with pytest.raises(ValueError):
            UavState(0, 0, -1.0, 0, 0, 0, 100)
        with pytest.raises(ValueError):
            UavState(0, 0, 9.0, 0, math.pi / 2, 0, 100)


@given(psi=st.floats(-50, 50))
@settings(max_examples=200, deadline=None)
def test_wrap_angle_range(psi):
    w = wrap_angle(psi)
    assert -math.pi <= w < math.pi
    assert math.sin(w) == pytest.approx(math.sin(psi), abs=1e-9)
    assert math.cos(w) == pytest.approx(math.cos(psi), abs=1e-9)


def test_heading_stays_wrapped(free_airframe):
    s = UavState(0.0, 0.0, 9.0, 3.0, math.radians(40.0), 0.0, 100.0)
    for _ in range(600):
        s = dynamics_step(free_airframe, s, math.radians(40.0))
        assert -math.pi <= s.psi < math.pi


class TestPredictTrajectory:
    def test_straight_samples_and_endpoint(self, free_airframe):
        s0 = UavState(0.0, 0.0, 9.0, 0.0, 0.0, 0.0, 100.0)
        tr = predict_trajectory(free_airframe, s0, RollAction(0.0, 4.0))
        assert len(tr) == 21
        assert tr.t[0] == 0.0 and tr.t[-1] == pytest.approx(4.0)
        assert tr.x[-1] == pytest.approx(0.0, abs=1e-9)
        assert tr.y[-1] == pytest.approx(36.0, rel=1e-9)

    def test_left_right_symmetry(self, free_airframe):
        right = predict_trajectory(
            free_airframe,
            UavState(0.0, 0.0, 9.0, 0.0, math.radians(10.0), 0.1, 100.0),
            RollAction(math.radians(45.0), 8.0),
        )
        left = predict_trajectory(
            free_airframe,
            UavState(0.0, 0.0, 9.0, 0.0, -math.radians(10.0), -0.1, 100.0),
            RollAction(-math.radians(45.0), 8.0),
        )
        np.testing.assert_allclose(right.x, -left.x, atol=1e-9)
        np.testing.assert_allclose(right.y, left.y, atol=1e-9)

    @pytest.mark.parametrize("bank_deg", [15.0, 30.0, 45.0])
    def test_steady_bank_circle(self, free_airframe, bank_deg):
        phi = math.radians(bank_deg)
        radius = turn_radius(9.0, phi)
        period = 2 * math.pi * radius / 9.0
        duration = round(2 * period / 0.2) * 0.2
        s0 = UavState(0.0, 0.0, 9.0, 0.0, phi, 0.0, 100.0)
        tr = predict_trajectory(free_airframe, s0, RollAction(phi, duration))
        pts = tr.positions
        center = pts.mean(axis=0)
        radii = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
        assert abs(radii.mean() - radius) / radius < 0.01

    def test_matches_repeated_dynamics_step(self, free_airframe):
        s0 = UavState(0.0, 0.0, 9.0, 0.3, 0.05, 0.0, 100.0)
        action = RollAction(math.radians(30.0), 4.0)
        tr = predict_trajectory(free_airframe, s0, action)
        s = s0.copy()
        pid = PidState()
        for k in range(1, 201):
            s = dynamics_step(free_airframe, s, action.target_bank, 0.02, pid)
            if k % 10 == 0:
                i = k // 10
                assert (s.x, s.y) == (tr.x[i], tr.y[i])
                assert s.phi == tr.phi[i]

    def test_bad_record_interval_rejected(self, free_airframe):
        s0 = UavState()
        with pytest.raises(ValueError):
            predict_trajectory(free_airframe, s0, RollAction(0.0, 4.0), dt=0.02, dt_record=0.03)


def test_default_airframe_constants(airframe):
    assert airframe.i_x == pytest.approx(0.00257482)
    assert airframe.c_lp == pytest.approx(-1.12808704)
    assert airframe.k_d == pytest.approx(0.41073588)
    assert airframe.k_a == pytest.approx(1.448331)


def test_airframe_validation():
    with pytest.raises(ValueError):
        AirframeParams(i_x=0.0)
    with pytest.raises(ValueError):
        AirframeParams(c_lp=0.5)
    with pytest.raises(ValueError):
        AirframeParams(max_bank=math.pi / 2)


def test_stall_prevention_clamp():
    assert AirframeParams().bank_limit == pytest.approx(math.radians(40.0))
    assert AirframeParams(stall_prevention=False).bank_limit == pytest.approx(math.radians(45.0))


def test_bank_rise_time(free_airframe):
    # closed loop reaches a commanded 45 deg from level in roughly 1.5 s
    s = UavState(0.0, 0.0, 9.0, 0.0, 0.0, 0.0, 100.0)
    pid = PidState()
    t, reached, overshoot = 0.0, None, 0.0
    while t < 4.0:
        s = dynamics_step(free_airframe, s, math.radians(45.0), 0.02, pid)
        t += 0.02
        if reached is None and s.phi >= 0.98 * math.radians(45.0):
            reached = t
        overshoot = max(overshoot, s.phi - math.radians(45.0))
    assert reached is not None and 0.8 < reached < 2.5
    assert overshoot < math.radians(5.0)
