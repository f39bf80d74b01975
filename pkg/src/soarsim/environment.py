"""Ground-truth world: thermal field, wind drift, sink polar, energy.

Flight kinematics run in the air-mass frame; wind only accumulates a
ground offset (ground position = air-mass position + offset), so the
same scenario with or without wind produces identical air-mass
trajectories and variometer readings. The variometer is netto: it
reports vertical airmass velocity at the UAV with sailplane sink already
removed, which is exactly the quantity the thermal belief models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dynamics import SIM_DT, AirframeParams, PidState, UavState, step_kinematics
from .params import ConfigError
from .thermal import ThermalParams

SCHEMA_VERSION = 1
DECAY_S = 10.0  # s over which a dying thermal's strength ramps to zero


@dataclass(frozen=True)
class ThermalSpec:
    """A thermal's parameters plus its lifecycle in the scenario."""

    params: ThermalParams  # air-mass frame at birth
    birth: float = 0.0  # s
    lifetime: float = math.inf  # s at full strength, then linear decay
    drift: tuple[float, float] = (0.0, 0.0)  # m/s relative to the air mass

    def lift(self, x: float, y: float, t: float) -> float:
        age = t - self.birth
        if age < 0.0:
            return 0.0
        if age <= self.lifetime:
            w0 = self.params.w0
        else:
            fade = 1.0 - (age - self.lifetime) / DECAY_S
            if fade <= 0.0:
                return 0.0
            w0 = self.params.w0 * fade
        cx = self.params.cx + self.drift[0] * age
        cy = self.params.cy + self.drift[1] * age
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        return w0 * math.exp(-d2 / (self.params.r0 * self.params.r0))


@dataclass(frozen=True)
class Scenario:
    """World definition; lift from multiple thermals superposes linearly."""

    thermals: tuple[ThermalSpec, ...] = ()
    wind: tuple[float, float] = (0.0, 0.0)  # m/s, ground frame
    turbulence_sigma: float = 0.15  # m/s added to true lift per step
    vario_sigma: float = 0.2  # m/s sensor noise
    vario_rate: float = 5.0  # Hz
    sink_s0: float = 0.7  # m/s still-air sink at reference airspeed
    seed: int = 0
    battery_j: float = 15600.0
    motor_power_w: float = 90.0
    motor_climb_rate: float = 2.5  # m/s added while the motor runs
    avionics_power_w: float = 3.0
    random_thermals: dict | None = None  # sampled per mission seed
    random_wind: dict | None = None

    def __post_init__(self):
        if not self.vario_rate > 0.0:
            raise ConfigError("vario_rate must be positive")
        if self.turbulence_sigma < 0.0 or self.vario_sigma < 0.0:
            raise ConfigError("noise sigmas must be non-negative")
        for th in self.thermals:
            if not th.lifetime > 0.0:
                raise ConfigError("thermal lifetimes must be positive")


def true_lift(sc: Scenario, x: float, y: float, t: float) -> float:
    """Total thermal lift at an air-mass-frame position, m/s."""
    return sum(th.lift(x, y, t) for th in sc.thermals)


def sink_rate(s0: float, phi: float) -> float:
    """Load-factor-corrected sink polar s0 * (1/cos(phi))^1.5, m/s."""
    return s0 * (1.0 / math.cos(phi)) ** 1.5


def sink(v: float, phi: float, sc: Scenario) -> float:
    """Still-air sink at bank phi; the polar is referenced to the
    scenario's (constant) airspeed, so v only names the operating point."""
    return sink_rate(sc.sink_s0, phi)


@dataclass(slots=True)
class WorldState:
    """Per-mission simulation state; one instance per UAV."""

    uav: UavState
    pid: PidState = field(default_factory=PidState)
    t: float = 0.0
    step: int = 0
    gx: float = 0.0  # integrated wind drift, m
    gy: float = 0.0
    battery_j: float = 15600.0
    motor_on: bool = False
    crashed: bool = False
    lift: float = 0.0  # true airmass vertical velocity at the UAV

    @property
    def ground_pos(self) -> tuple[float, float]:
        return (self.uav.x + self.gx, self.uav.y + self.gy)


def make_world(sc: Scenario, h0: float, psi0: float = 0.0, v: float = 9.0) -> WorldState:
    return WorldState(uav=UavState(0.0, 0.0, v, psi0, 0.0, 0.0, h0), battery_j=sc.battery_j)


def env_step(
    sc: Scenario,
    airframe: AirframeParams,
    w: WorldState,
    target_bank: float,
    dt: float = SIM_DT,
    rng: np.random.Generator | None = None,
) -> WorldState:
    """Advance the world one tick; mutates and returns w.

    Kinematics advance in the air-mass frame, then lift/sink/motor set
    the altitude rate at the new pose, wind accumulates ground offset,
    and the battery drains (motor power while on, avionics always).
    """
    u = w.uav
    u.x, u.y, u.psi, u.phi, u.phi_dot = step_kinematics(
        airframe, u.x, u.y, u.v, u.psi, u.phi, u.phi_dot, target_bank, dt, w.pid
    )
    w.step += 1
    w.t = w.step * dt
    lift = true_lift(sc, u.x, u.y, w.t)
    if sc.turbulence_sigma > 0.0 and rng is not None:
        lift += sc.turbulence_sigma * rng.standard_normal()
    w.lift = lift
    climb = sc.motor_climb_rate if w.motor_on else 0.0
    u.h += (lift - sink_rate(sc.sink_s0, u.phi) + climb) * dt
    if u.h <= 0.0:
        u.h = 0.0
        w.crashed = True
    w.gx += sc.wind[0] * dt
    w.gy += sc.wind[1] * dt
    power = sc.avionics_power_w + (sc.motor_power_w if w.motor_on else 0.0)
    w.battery_j = max(0.0, w.battery_j - power * dt)
    return w


def vario_period_steps(sc: Scenario, dt: float = SIM_DT) -> int:
    return max(1, round(1.0 / (sc.vario_rate * dt)))


def gen_observation(sc: Scenario, w: WorldState, rng: np.random.Generator) -> float | None:
    """Netto variometer reading when a sensor tick elapses, else None."""
    if w.step == 0 or w.step % vario_period_steps(sc) != 0:
        return None
    if sc.vario_sigma > 0.0:
        return w.lift + sc.vario_sigma * rng.standard_normal()
    return w.lift


# ---------------------------------------------------------------------------
# scenario files and per-seed materialization

def materialize(sc: Scenario, seed: int) -> Scenario:
    """Resolve random_thermals / random_wind blocks into concrete values.

    Deterministic per seed; the result is the shared world realization
    for a paired mission (both UAVs fly the identical field).
    """
    if sc.random_thermals is None and sc.random_wind is None:
        return sc
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    wind = sc.wind
    if sc.random_wind is not None:
        lo, hi = sc.random_wind["speed"]
        speed = rng.uniform(lo, hi)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        wind = (speed * math.sin(angle), speed * math.cos(angle))
    thermals = sc.thermals
    if sc.random_thermals is not None:
        spec = sc.random_thermals
        births = spec.get("birth", [0.0, 0.0])
        lifetimes = spec.get("lifetime", [600.0, 600.0])
        drift_speed = spec.get("drift", [0.0, 0.0])

        def anchor():
            if "ring" in spec:
                # annulus around the course center, where the waypoint laps fly
                radius = rng.uniform(*spec["ring"]["radius"])
                angle = rng.uniform(0.0, 2.0 * math.pi)
                return radius * math.cos(angle), radius * math.sin(angle)
            (x0, y0), (x1, y1) = spec["box"]
            return rng.uniform(x0, x1), rng.uniform(y0, y1)

        def bell(cx, cy):
            w0 = rng.uniform(*spec["w0"])
            r_lo, r_hi = spec["r0"]
            if spec.get("r0_log"):
                r0 = math.exp(rng.uniform(math.log(r_lo), math.log(r_hi)))
            else:
                r0 = rng.uniform(r_lo, r_hi)
            birth = rng.uniform(*births)
            life = rng.uniform(*lifetimes)
            speed = rng.uniform(*drift_speed)
            angle = rng.uniform(0.0, 2.0 * math.pi)
            drift = (speed * math.cos(angle), speed * math.sin(angle))
            return ThermalSpec(ThermalParams(w0, r0, cx, cy), birth, life, drift)

        drawn = []
        if "clusters" in spec:
            # irregular multi-core lift: each cluster is a few offset bells
            lo, hi = spec.get("bells", [1, 3])
            sigma = spec.get("offset_sigma", 40.0)
            for _ in range(int(spec["clusters"])):
                ax, ay = anchor()
                for _ in range(rng.integers(lo, hi + 1)):
                    drawn.append(bell(ax + sigma * rng.standard_normal(), ay + sigma * rng.standard_normal()))
        else:
            for _ in range(int(spec["count"])):
                drawn.append(bell(*anchor()))
        thermals = sc.thermals + tuple(drawn)
    return replace(sc, thermals=thermals, wind=wind, random_thermals=None, random_wind=None, seed=seed)


def calm_variant(sc: Scenario) -> Scenario:
    """The scenario with lift and turbulence removed, for baseline flights."""
    return replace(sc, thermals=(), random_thermals=None, turbulence_sigma=0.0)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "thermals": [
            {
                "w0": th.params.w0,
                "r0": th.params.r0,
                "center": [th.params.cx, th.params.cy],
                "birth": th.birth,
                "lifetime": th.lifetime if math.isfinite(th.lifetime) else None,
                "drift": list(th.drift),
            }
            for th in sc.thermals
        ],
        "wind": list(sc.wind),
        "turbulence_sigma": sc.turbulence_sigma,
        "vario_sigma": sc.vario_sigma,
        "vario_rate": sc.vario_rate,
        "sink_s0": sc.sink_s0,
        "seed": sc.seed,
        "battery_j": sc.battery_j,
        "motor_power_w": sc.motor_power_w,
        "motor_climb_rate": sc.motor_climb_rate,
        "avionics_power_w": sc.avionics_power_w,
        "random_thermals": sc.random_thermals,
        "random_wind": sc.random_wind,
    }


def scenario_from_dict(data: dict) -> Scenario:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported scenario schema_version {data.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    try:
        thermals = tuple(
            ThermalSpec(
                ThermalParams(th["w0"], th["r0"], th["center"][0], th["center"][1]),
                birth=th.get("birth", 0.0),
                lifetime=math.inf if th.get("lifetime") is None else th["lifetime"],
                drift=tuple(th.get("drift", (0.0, 0.0))),
            )
            for th in data.get("thermals", [])
        )
        return Scenario(
            thermals=thermals,
            wind=tuple(data.get("wind", (0.0, 0.0))),
            turbulence_sigma=data.get("turbulence_sigma", 0.15),
            vario_sigma=data.get("vario_sigma", 0.2),
            vario_rate=data.get("vario_rate", 5.0),
            sink_s0=data.get("sink_s0", 0.7),
            seed=data.get("seed", 0),
            battery_j=data.get("battery_j", 15600.0),
            motor_power_w=data.get("motor_power_w", 90.0),
            motor_climb_rate=data.get("motor_climb_rate", 2.5),
            avionics_power_w=data.get("avionics_power_w", 3.0),
            random_thermals=data.get("random_thermals"),
            random_wind=data.get("random_wind"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario: {exc}") from exc


def load_scenario_file(path: str | Path) -> dict:
    """Parse a scenario/mission JSON file; returns the raw document."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"scenario file {path} must hold a JSON object")
    return data
