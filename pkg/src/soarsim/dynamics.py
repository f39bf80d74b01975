"""Sailplane roll/turn/position dynamics and action-trajectory prediction.

Roll channel: aileron deflection from a PID on bank error, roll damping
moment Lp = -Kd*Clp*phi_dot/(2v), roll acceleration (Ka*da - Lp)/Ix.
Turn: psi_dot = g*tan(phi)/v (coordinated turn); position advances along
the heading at constant airspeed. Altitude is not touched here; vertical
motion belongs to the environment.

Integration is explicit Euler at a fixed 0.02 s step (50 Hz control
loop); trajectory prediction runs the same step and PID as the
environment so predicted and executed paths agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

SIM_DT = 0.02  # s, fixed integration step (50 Hz loop)
RECORD_DT = 0.2  # s, trajectory recording resolution


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class PidGains:
    """Roll-channel PID gains; output is aileron deflection in [-1, 1]."""

    kp: float = 0.04
    ki: float = 0.006
    kd_gain: float = 0.01
    int_limit: float = 0.3  # clamp on the accumulated integral term


@dataclass
class PidState:
    """Mutable PID memory, explicitly owned by the caller."""

    integrator: float = 0.0
    prev_error: float | None = None

    def copy(self) -> "PidState":
        return PidState(self.integrator, self.prev_error)


@dataclass(frozen=True)
class AirframeParams:
    """Roll-axis airframe constants plus bank limits and PID gains.

    Defaults are the Radian Pro 2 m sailplane values. stall_prevention
    tightens the bank clamp to stall_bank_limit (autopilot behavior keyed
    by SOAR_NO_STALLPRV in the param file: 0 = prevention active).
    """

    i_x: float = 0.00257482  # roll moment of inertia, kg m^2
    c_lp: float = -1.12808704  # roll damping derivative (< 0)
    k_d: float = 0.41073588  # roll damping coefficient
    k_a: float = 1.448331  # aileron effectiveness coefficient
    g: float = 9.80665  # m/s^2
    max_bank: float = math.radians(45.0)
    stall_prevention: bool = True
    stall_bank_limit: float = math.radians(40.0)
    pid: PidGains = field(default_factory=PidGains)

    def __post_init__(self):
        if not self.i_x > 0.0:
            raise ValueError("i_x must be positive")
        if not self.k_a > 0.0:
            raise ValueError("k_a must be positive")
        if not self.c_lp < 0.0:
            raise ValueError("c_lp must be negative (damping opposes roll rate)")
        if not 0.0 < self.max_bank < math.pi / 2:
            raise ValueError("max_bank must lie in (0, pi/2)")

    @property
    def bank_limit(self) -> float:
        """Effective bank clamp applied by the dynamics."""
        if self.stall_prevention:
            return min(self.max_bank, self.stall_bank_limit)
        return self.max_bank


@dataclass(slots=True)
class UavState:
    """Kinematic state of the sailplane in the air-mass frame."""

    x: float = 0.0  # m
    y: float = 0.0  # m
    v: float = 9.0  # airspeed, m/s (constant in flight)
    psi: float = 0.0  # heading, rad, 0 = north (+y), positive clockwise
    phi: float = 0.0  # bank angle, rad
    phi_dot: float = 0.0  # roll rate, rad/s
    h: float = 100.0  # altitude MSL, m

    def __post_init__(self):
        if not self.v > 0.0:
            raise ValueError("airspeed must be positive")
        if not abs(self.phi) < math.pi / 2:
            raise ValueError("bank magnitude must be below pi/2")

    def copy(self) -> "UavState":
        return UavState(self.x, self.y, self.v, self.psi, self.phi, self.phi_dot, self.h)

    @property
    def p(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class RollAction:
    """A coordinated turn at a commanded bank angle for a fixed duration."""

    target_bank: float  # rad
    duration: float  # s

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ValueError("action duration must be positive")


@dataclass
class ActionTrajectory:
    """Predicted poses sampled along one candidate action."""

    t: np.ndarray  # (n,) s, starting at 0
    x: np.ndarray  # (n,) m
    y: np.ndarray  # (n,) m
    phi: np.ndarray  # (n,) rad
    psi: np.ndarray  # (n,) rad

    def __len__(self) -> int:
        return len(self.t)

    @property
    def positions(self) -> np.ndarray:
        return np.stack([self.x, self.y], axis=-1)


def pid_roll(params: AirframeParams, bank_error: float, dt: float, pid_state: PidState) -> float:
    """Aileron deflection in [-1, 1] from the roll PID; updates pid_state."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    g = params.pid
    pid_state.integrator += g.ki * bank_error * dt
    if pid_state.integrator > g.int_limit:
        pid_state.integrator = g.int_limit
    elif pid_state.integrator < -g.int_limit:
        pid_state.integrator = -g.int_limit
    if pid_state.prev_error is None:
        deriv = 0.0
    else:
        deriv = (bank_error - pid_state.prev_error) / dt
    pid_state.prev_error = bank_error
    out = g.kp * bank_error + pid_state.integrator + g.kd_gain * deriv
    if out > 1.0:
        return 1.0
    if out < -1.0:
        return -1.0
    return out


def roll_damping_moment(params: AirframeParams, phi_dot: float, v: float) -> float:
    """Roll damping moment Lp = -Kd*Clp*phi_dot/(2v)."""
    return -params.k_d * params.c_lp * phi_dot / (2.0 * v)


def step_kinematics(
    params: AirframeParams,
    x: float,
    y: float,
    v: float,
    psi: float,
    phi: float,
    phi_dot: float,
    target_bank: float,
    dt: float,
    pid_state: PidState,
) -> tuple[float, float, float, float, float]:
    """One explicit-Euler step of the roll/turn/position equations.

    Returns (x, y, psi, phi, phi_dot). All derivatives are evaluated at
    the current state; the attained bank is clamped to the airframe's
    bank limit and the outward roll rate zeroed at the stop, so tan(phi)
    stays finite.
    """
    aileron = pid_roll(params, target_bank - phi, dt, pid_state)
    lp = -params.k_d * params.c_lp * phi_dot / (2.0 * v)
    phi_ddot = (params.k_a * aileron - lp) / params.i_x
    nx = x + v * math.sin(psi) * dt
    ny = y + v * math.cos(psi) * dt
    npsi = wrap_angle(psi + params.g * math.tan(phi) / v * dt)
    nphi = phi + phi_dot * dt
    nphi_dot = phi_dot + phi_ddot * dt
    limit = params.bank_limit
    if nphi > limit:
        nphi = limit
        if nphi_dot > 0.0:
            nphi_dot = 0.0
    elif nphi < -limit:
        nphi = -limit
        if nphi_dot < 0.0:
            nphi_dot = 0.0
    return nx, ny, npsi, nphi, nphi_dot


def dynamics_step(
    params: AirframeParams,
    s: UavState,
    target_bank: float,
    dt: float = SIM_DT,
    pid_state: PidState | None = None,
) -> UavState:
    """Advance the UAV one step toward target_bank; altitude is untouched."""
    if pid_state is None:
        pid_state = PidState()
    x, y, psi, phi, phi_dot = step_kinematics(
        params, s.x, s.y, s.v, s.psi, s.phi, s.phi_dot, target_bank, dt, pid_state
    )
    return UavState(x, y, s.v, psi, phi, phi_dot, s.h)


def predict_trajectory(
    params: AirframeParams,
    s0: UavState,
    action: RollAction,
    dt: float = SIM_DT,
    dt_record: float = RECORD_DT,
    pid_state: PidState | None = None,
) -> ActionTrajectory:
    """Simulate the closed-loop response to action and record poses.

    Integrates at dt (default 0.02 s, matching the control loop) and
    records (t, position, phi, psi) every dt_record, from t = 0 through
    t = action.duration. The PID state defaults to a fresh controller and
    is never shared with the caller's.
    """
    every = round(dt_record / dt)
    if every < 1 or abs(every * dt - dt_record) > 1e-9:
        raise ValueError("dt_record must be a multiple of dt")
    n_rec = round(action.duration / dt_record)
    pid = PidState() if pid_state is None else pid_state.copy()

    ts = np.empty(n_rec + 1)
    xs = np.empty(n_rec + 1)
    ys = np.empty(n_rec + 1)
    phis = np.empty(n_rec + 1)
    psis = np.empty(n_rec + 1)
    ts[0], xs[0], ys[0], phis[0], psis[0] = 0.0, s0.x, s0.y, s0.phi, s0.psi

    x, y, psi, phi, phi_dot = s0.x, s0.y, s0.psi, s0.phi, s0.phi_dot
    v = s0.v
    target = action.target_bank
    for k in range(1, n_rec * every + 1):
        x, y, psi, phi, phi_dot = step_kinematics(
            params, x, y, v, psi, phi, phi_dot, target, dt, pid
        )
        if k % every == 0:
            i = k // every
            ts[i] = k * dt
            xs[i] = x
            ys[i] = y
            phis[i] = phi
            psis[i] = psi
    return ActionTrajectory(ts, xs, ys, phis, psis)


def turn_radius(v: float, phi: float, g: float = 9.80665) -> float:
    """Steady coordinated-turn radius v^2/(g*tan(phi))."""
    return v * v / (g * math.tan(phi))


def default_airframe(**overrides) -> AirframeParams:
    """Radian Pro airframe with any field overridden."""
    return replace(AirframeParams(), **overrides) if overrides else AirframeParams()
