"""Autopilot-style parameter file: KEY=VALUE lines, '#' comments.

Unknown keys are rejected with the offending line number. Values
override the built-in defaults; angle-valued keys are in degrees in the
file and converted to radians when configs are built.
"""

from __future__ import annotations

import math
from pathlib import Path


class ConfigError(Exception):
    """Bad configuration input (param file, scenario/mission JSON, CLI)."""


def _banks(text: str) -> tuple[float, ...]:
    parts = [p for p in str(text).replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty bank list")
    return tuple(float(p) for p in parts)


# key -> (parser, default). Ints double as flags (0/1), autopilot style.
PARAM_SPEC: dict = {
    # airframe (roll-axis constants fitted for the Radian Pro) and roll PID
    "SOAR_I_MOMENT": (float, 0.00257482),
    "SOAR_ROLL_CLP": (float, -1.12808704),
    "SOAR_K_ROLLDAMP": (float, 0.41073588),
    "SOAR_K_AILERON": (float, 1.448331),
    "SOAR_NO_STALLPRV": (int, 0),  # 1 disables the 40 deg stall-prevention clamp
    "SOAR_MAX_BANK": (float, 45.0),  # deg
    "RLL2SRV_P": (float, 0.04),
    "RLL2SRV_I": (float, 0.006),
    "RLL2SRV_D": (float, 0.01),
    "RLL2SRV_IMAX": (float, 0.3),
    "ARSPD_TRIM": (float, 9.0),  # m/s target airspeed
    # thermal belief prior and filter noise
    "SOAR_THML_W0": (float, 1.5),
    "SOAR_THML_R0": (float, 80.0),
    "SOAR_THML_VAR_W0": (float, 1.0),
    "SOAR_THML_VAR_R0": (float, 400.0),
    "SOAR_THML_VAR_POS": (float, 400.0),
    "SOAR_THML_Q_W0": (float, 0.0004),  # per second
    "SOAR_THML_Q_R0": (float, 0.0004),
    "SOAR_THML_Q_POS": (float, 0.25),
    "SOAR_THML_R": (float, 0.04),  # variometer noise variance
    # planner
    "SOAR_POMDP_ON": (int, 1),  # 1 = pomdsoar, 0 = fixed-circle baseline
    "SOAR_POMDP_HORI": (float, 4.0),  # s
    "SOAR_POMDP_EXT": (float, 3.0),
    "SOAR_POMDP_N": (int, 10),
    "SOAR_CONF_THRES": (float, 150.0),
    "SOAR_POMDP_BANKS": (_banks, (-45.0, -30.0, -15.0, 0.0, 15.0, 30.0, 45.0)),  # deg
    "SOAR_POMDP_SINKCOMP": (int, 1),
    "SOAR_POMDP_REPLAN": (float, 1.0),  # s between planning cycles
    # fixed-circle baseline
    "SOAR_THML_RADIUS": (float, 60.0),  # m
    "SOAR_LOITER_KP": (float, 0.8),  # deg of bank per m of radial error
    "SOAR_LOITER_KD": (float, 2.0),  # deg of bank per m/s of radial rate
    # mission / soaring state machine
    "SOAR_ENABLE": (int, 1),
    "SOAR_ALT_MIN": (float, None),  # m; None = take from the mission file
    "SOAR_ALT_CUTOFF": (float, None),
    "SOAR_ALT_MAX": (float, None),
    "SOAR_VSPEED": (float, 0.5),  # m/s filtered-lift detection threshold
    "SOAR_EXIT_VSPEED": (float, 0.0),
    "SOAR_EXIT_HOLD": (float, 8.0),  # s below exit threshold before giving up
    "SOAR_REENTRY_M": (float, 10.0),  # m below SOAR_ALT_MAX before re-arming detection
    "SOAR_FILT_TAU": (float, 2.0),  # s low-pass for detection/exit
    "NAV_BANK_LIM": (float, 30.0),  # deg bank limit for waypoint guidance
    "NAV_GAIN": (float, 1.5),  # bank per rad of heading error
    "NAV_WP_RADIUS": (float, 20.0),  # m waypoint acceptance radius
}


def default_params() -> dict:
    return {key: default for key, (_, default) in PARAM_SPEC.items()}


def parse_param_file(path: str | Path) -> dict:
    """Parse overrides from a param file; unknown keys are an error."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read param file {path}: {exc}") from exc
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected KEY=VALUE, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_SPEC:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        parser = PARAM_SPEC[key][0]
        try:
            overrides[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return overrides


def resolve_params(overrides: dict | None = None) -> dict:
    params = default_params()
    if overrides:
        params.update(overrides)
    return params


def airframe_from_params(p: dict):
    from .dynamics import AirframeParams, PidGains

    return AirframeParams(
        i_x=p["SOAR_I_MOMENT"],
        c_lp=p["SOAR_ROLL_CLP"],
        k_d=p["SOAR_K_ROLLDAMP"],
        k_a=p["SOAR_K_AILERON"],
        max_bank=math.radians(p["SOAR_MAX_BANK"]),
        stall_prevention=not p["SOAR_NO_STALLPRV"],
        pid=PidGains(
            kp=p["RLL2SRV_P"],
            ki=p["RLL2SRV_I"],
            kd_gain=p["RLL2SRV_D"],
            int_limit=p["RLL2SRV_IMAX"],
        ),
    )


def noise_from_params(p: dict):
    from .belief import NoiseConfig

    return NoiseConfig(
        q_diag=(p["SOAR_THML_Q_W0"], p["SOAR_THML_Q_R0"], p["SOAR_THML_Q_POS"], p["SOAR_THML_Q_POS"]),
        r_obs=p["SOAR_THML_R"],
    )


def prior_from_params(p: dict):
    from .belief import default_prior

    return default_prior(
        w0=p["SOAR_THML_W0"],
        r0=p["SOAR_THML_R0"],
        var_w0=p["SOAR_THML_VAR_W0"],
        var_r0=p["SOAR_THML_VAR_R0"],
        var_pos=p["SOAR_THML_VAR_POS"],
    )


def planner_from_params(p: dict, sink_s0: float = 0.7):
    from .pomdsoar import PlannerConfig

    return PlannerConfig(
        bank_angles=tuple(math.radians(b) for b in p["SOAR_POMDP_BANKS"]),
        t_explore=p["SOAR_POMDP_HORI"],
        exploit_extension=p["SOAR_POMDP_EXT"],
        n_samples=p["SOAR_POMDP_N"],
        confidence_thres=p["SOAR_CONF_THRES"],
        sink_correction=bool(p["SOAR_POMDP_SINKCOMP"]),
        sink_s0=sink_s0,
    )


def baseline_from_params(p: dict):
    from .baseline import BaselineConfig

    # the loiter flies under the same effective bank limit as the dynamics
    max_bank = p["SOAR_MAX_BANK"] if p["SOAR_NO_STALLPRV"] else min(p["SOAR_MAX_BANK"], 40.0)
    return BaselineConfig(
        circle_radius=p["SOAR_THML_RADIUS"],
        kp=math.radians(p["SOAR_LOITER_KP"]),
        kd=math.radians(p["SOAR_LOITER_KD"]),
        max_bank=math.radians(max_bank),
    )
