"""Fixed-radius circling baseline around the EKF thermal position mean.

The bank command tracks a circle of configured radius about the
estimated center: the coordinated-turn nominal atan(v^2/(g*R)) plus a
proportional correction on radial error and a damping term on radial
rate. The turn direction is committed once per thermal encounter and
held until exit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .belief import GaussianBelief
from .dynamics import UavState


@dataclass(frozen=True)
class BaselineConfig:
    circle_radius: float = 60.0  # m
    kp: float = math.radians(0.8)  # rad of bank per m of radial error
    kd: float = math.radians(2.0)  # rad of bank per m/s of radial rate
    max_bank: float = math.radians(40.0)  # loiter honors the stall-prevention limit
    g: float = 9.80665

    def __post_init__(self):
        if not self.circle_radius > 0.0:
            raise ValueError("circle radius must be positive")


def commit_direction(phi: float) -> int:
    """Turn direction at thermal entry: the current bank's sign, ties left."""
    return 1 if phi > 0.0 else -1


def baseline_choose_bank(
    cfg: BaselineConfig,
    uav: UavState,
    b: GaussianBelief,
    direction: int = 1,
) -> float:
    """Target bank, rad, tracking the fixed circle about the belief mean.

    direction is +1 for a right-hand (clockwise) orbit, -1 for left.
    Output saturates at +/- max_bank.
    """
    # belief center is relative to the UAV; radial vector points UAV-ward
    dx, dy = -b.mean[2], -b.mean[3]
    r = math.hypot(dx, dy)
    err = r - cfg.circle_radius
    if r > 1e-9:
        vx = uav.v * math.sin(uav.psi)
        vy = uav.v * math.cos(uav.psi)
        r_rate = (dx * vx + dy * vy) / r
    else:
        r_rate = 0.0
    nominal = math.atan(uav.v * uav.v / (cfg.g * cfg.circle_radius))
    cmd = direction * (nominal + cfg.kp * err + cfg.kd * r_rate)
    return max(-cfg.max_bank, min(cfg.max_bank, cmd))
