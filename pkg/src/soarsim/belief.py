"""Gaussian belief over thermal state (w0, r0, cx, cy) with EKF updates.

The center components (cx, cy) are the thermal center relative to the
UAV, so the transition under UAV motion is a pure shift of the mean and
the observation is the lift at the origin. The observation map is
linearized at the current mean (scalar-measurement EKF); covariance
hygiene is re-symmetrization after every update plus a one-shot jitter
retry when a Cholesky factor is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thermal import ThermalParams, lift_at, lift_jacobian

R0_FLOOR = 1.0  # m; the observation model is singular at r0 = 0
JITTER = 1e-9

# state vector ordering used everywhere
IDX_W0, IDX_R0, IDX_CX, IDX_CY = 0, 1, 2, 3


@dataclass
class GaussianBelief:
    """Mean (4,) ordered (w0, r0, cx, cy) and 4x4 covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(4)
        self.cov = np.asarray(self.cov, dtype=float).reshape(4, 4)
        if not np.allclose(self.cov, self.cov.T, atol=1e-9):
            raise ValueError("covariance must be symmetric")

    def copy(self) -> "GaussianBelief":
        return GaussianBelief(self.mean.copy(), self.cov.copy())

    def as_thermal(self) -> ThermalParams:
        w0, r0, cx, cy = self.mean
        return ThermalParams(w0, max(r0, R0_FLOOR), cx, cy)


@dataclass(frozen=True)
class NoiseConfig:
    """Process noise (diagonal, per second) and variometer noise variance."""

    q_diag: tuple[float, float, float, float] = (0.0004, 0.0004, 0.25, 0.25)
    r_obs: float = 0.04  # (m/s)^2, sigma = 0.2 m/s

    def __post_init__(self):
        if any(q < 0.0 for q in self.q_diag):
            raise ValueError("process noise entries must be non-negative")
        if not self.r_obs > 0.0:
            raise ValueError("observation noise variance must be positive")


def default_prior(
    w0: float = 1.5,
    r0: float = 80.0,
    var_w0: float = 1.0,
    var_r0: float = 400.0,
    var_pos: float = 400.0,
) -> GaussianBelief:
    """Initial thermal belief: typical local thermal, center at the UAV."""
    return GaussianBelief(
        np.array([w0, r0, 0.0, 0.0]),
        np.diag([var_w0, var_r0, var_pos, var_pos]),
    )


def predict_shift(
    b: GaussianBelief,
    uav_displacement,
    noise: NoiseConfig,
    dt: float = 1.0,
) -> GaussianBelief:
    """Transition under UAV motion: the relative center shifts opposite the
    displacement, the thermal itself does not change, and process noise
    (per second, scaled by dt) inflates the covariance."""
    mean = b.mean.copy()
    mean[IDX_CX] -= uav_displacement[0]
    mean[IDX_CY] -= uav_displacement[1]
    cov = b.cov + np.diag(noise.q_diag) * dt
    return GaussianBelief(mean, cov)


def ekf_update(
    b: GaussianBelief,
    observed_lift: float,
    noise: NoiseConfig,
    linear_h: np.ndarray | None = None,
) -> GaussianBelief:
    """Scalar-measurement EKF correction for one variometer reading.

    The measurement is the vertical airmass velocity at the UAV (the
    origin of the relative frame). linear_h replaces the linearized
    observation map with a fixed linear one (o = h @ state), used by
    equivalence tests against closed-form Kalman algebra.
    """
    if not np.isfinite(observed_lift):
        raise ValueError(f"non-finite variometer reading: {observed_lift}")
    if linear_h is not None:
        h = np.asarray(linear_h, dtype=float)
        predicted = float(h @ b.mean)
    else:
        th = b.as_thermal()
        h = lift_jacobian(th)
        predicted = lift_at(th, (0.0, 0.0))
    cov_h = b.cov @ h
    s = float(h @ cov_h) + noise.r_obs
    k = cov_h / s
    mean = b.mean + k * (observed_lift - predicted)
    cov = b.cov - np.outer(k, cov_h)
    cov = (cov + cov.T) * 0.5
    if mean[IDX_R0] < R0_FLOOR:
        mean = mean.copy()
        mean[IDX_R0] = R0_FLOOR
    return GaussianBelief(mean, cov)


def cholesky_with_jitter(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; one jitter retry, then the belief is corrupt."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        try:
            return np.linalg.cholesky(cov + JITTER * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise ValueError("belief covariance is not positive definite") from exc


def sample_thermal(b: GaussianBelief, rng: np.random.Generator) -> ThermalParams:
    """One thermal hypothesis drawn from the belief (relative frame)."""
    chol = cholesky_with_jitter(b.cov)
    draw = b.mean + chol @ rng.standard_normal(4)
    return ThermalParams(float(draw[0]), max(float(draw[1]), R0_FLOOR), float(draw[2]), float(draw[3]))


def uncertainty(b: GaussianBelief, weights=None) -> float:
    """Covariance trace, optionally weighted per component.

    Units mix (m/s)^2 and m^2, so the confidence threshold that consumes
    this value is coupled to the chosen weights.
    """
    d = np.diagonal(b.cov)
    if weights is None:
        return float(d.sum())
    return float(np.dot(np.asarray(weights, dtype=float), d))
