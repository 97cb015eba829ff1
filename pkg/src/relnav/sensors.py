"""Simulated ranging, egomotion and altitude measurements.

Every draw comes from a stream keyed by (seed, channel, ids, step), so
measurement sequences are deterministic and adding robots to a scenario
does not perturb the streams of existing ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

_UWB_CHANNEL = 1
_VIO_CHANNEL = 2
_ALT_CHANNEL = 3


def _stream(seed: int, channel: int, *ids: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, channel, *ids]))


@dataclass(frozen=True)
class NoiseConfig:
    """Noise levels for the simulated sensors.

    VIO drift per step must stay well below the ranging noise
    (sigma_vio < sigma_uwb / 10) for the range smoother to make sense.
    """

    sigma_uwb: float = 0.1
    sigma_vio: float = 0.009
    seed: int = 0

    def __post_init__(self):
        if self.sigma_uwb < 0 or self.sigma_vio < 0:
            raise ValueError("noise sigmas must be >= 0")
        if self.sigma_uwb > 0 and not self.sigma_vio < self.sigma_uwb / 10:
            raise ValueError("sigma_vio must be < sigma_uwb / 10")


@dataclass(frozen=True)
class RangeMeasurement:
    edge: tuple[int, int]
    range: float
    timestamp: float


@dataclass(frozen=True)
class VioDelta:
    """One egomotion step: yaw increment plus body-frame translation."""

    agent: int
    yaw_delta: float
    translation: tuple[float, float]  # previous body frame, meters
    dt: float

    @property
    def translation_norm(self) -> float:
        return math.hypot(*self.translation)


@dataclass(frozen=True)
class AltitudeReading:
    agent: int
    h_lidar: float
    h_uwb: float
    h_vio: float


def simulate_uwb(p_i, p_j, i: int, j: int, cfg: NoiseConfig, step: int,
                 timestamp: float = 0.0) -> RangeMeasurement:
    """Noisy range for edge (i, j), symmetric in the endpoint order."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    a, b = (i, j) if i < j else (j, i)
    true = float(np.linalg.norm(p_i - p_j))
    noise = 0.0
    if cfg.sigma_uwb > 0:
        rng = _stream(cfg.seed, _UWB_CHANNEL, a, b, step)
        noise = rng.normal(0.0, cfg.sigma_uwb)
    return RangeMeasurement(edge=(a, b), range=max(true + noise, 0.0),
                            timestamp=timestamp)


def simulate_vio(agent: int, pose_prev, pose_now, dt: float,
                 cfg: NoiseConfig, step: int) -> VioDelta:
    """Noisy egomotion between two planar poses (x, y, yaw).

    The reported translation keeps the true body-frame direction but its
    norm and bearing are perturbed at the sigma_vio scale; the yaw
    increment gets small-angle noise of the same magnitude.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x0, y0, yaw0 = pose_prev
    x1, y1, yaw1 = pose_now
    dx, dy = x1 - x0, y1 - y0
    # true translation in the previous body frame
    c, s = math.cos(-yaw0), math.sin(-yaw0)
    tx, ty = c * dx - s * dy, s * dx + c * dy
    dyaw = yaw1 - yaw0
    if cfg.sigma_vio > 0:
        rng = _stream(cfg.seed, _VIO_CHANNEL, agent, step)
        norm = math.hypot(tx, ty)
        noisy_norm = norm + rng.normal(0.0, cfg.sigma_vio)
        ang_noise = rng.normal(0.0, cfg.sigma_vio)
        dyaw += rng.normal(0.0, cfg.sigma_vio)
        base = math.atan2(ty, tx) if norm > 0 else 0.0
        ang = base + ang_noise
        tx, ty = noisy_norm * math.cos(ang), noisy_norm * math.sin(ang)
    return VioDelta(agent=agent, yaw_delta=dyaw, translation=(tx, ty), dt=dt)


def simulate_altitude(agent: int, true_h: float, cfg: NoiseConfig, step: int,
                      lidar_fault: float = 0.0) -> AltitudeReading:
    """Altitude triplet for one MAV; lidar_fault offsets the lidar channel."""
    if cfg.sigma_vio > 0 or cfg.sigma_uwb > 0:
        rng = _stream(cfg.seed, _ALT_CHANNEL, agent, step)
        h_lidar = max(true_h + lidar_fault + rng.normal(0.0, cfg.sigma_vio), 0.0)
        h_uwb = true_h + rng.normal(0.0, cfg.sigma_uwb)
        h_vio = true_h + rng.normal(0.0, cfg.sigma_vio)
    else:
        h_lidar, h_uwb, h_vio = max(true_h + lidar_fault, 0.0), true_h, true_h
    return AltitudeReading(agent=agent, h_lidar=h_lidar, h_uwb=h_uwb, h_vio=h_vio)


def fuse_altitude(reading: AltitudeReading, threshold: float = 1.0) -> float:
    """Trust the lidar when all three sources agree, else fall back.

    Mismatch is the max pairwise absolute difference; the fallback is the
    mean of the UWB and VIO channels. Strict inequality at the threshold.
    """
    spread = max(
        abs(reading.h_lidar - reading.h_uwb),
        abs(reading.h_lidar - reading.h_vio),
        abs(reading.h_uwb - reading.h_vio),
    )
    if spread < threshold:
        return reading.h_lidar
    return 0.5 * (reading.h_uwb + reading.h_vio)


@dataclass(frozen=True)
class RangeFilterState:
    """Per-edge smoother state: last smoothed range plus dead-reckoned
    endpoint positions and headings used to predict range change."""

    smoothed: float
    pos_i: tuple[float, float]
    pos_j: tuple[float, float]
    yaw_i: float
    yaw_j: float
    gain: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.gain <= 1.0:
            raise ValueError("gain must be in (0, 1]")
        if self.smoothed < 0:
            raise ValueError("smoothed range must be >= 0")


def init_range_filter(meas: RangeMeasurement, pos_i, pos_j,
                      yaw_i: float = 0.0, yaw_j: float = 0.0,
                      gain: float = 0.3) -> RangeFilterState:
    """Seed the filter from the first raw range and current position
    estimates of the two endpoints."""
    return RangeFilterState(
        smoothed=meas.range,
        pos_i=(float(pos_i[0]), float(pos_i[1])),
        pos_j=(float(pos_j[0]), float(pos_j[1])),
        yaw_i=yaw_i, yaw_j=yaw_j, gain=gain,
    )


def _advance(pos, yaw, vio: VioDelta):
    c, s = math.cos(yaw), math.sin(yaw)
    tx, ty = vio.translation
    return (pos[0] + c * tx - s * ty, pos[1] + s * tx + c * ty), yaw + vio.yaw_delta


def smooth_range(state: RangeFilterState, meas: RangeMeasurement,
                 vio_i: VioDelta | None, vio_j: VioDelta | None,
                 ) -> tuple[float, RangeFilterState]:
    """Predictor-corrector range smoother.

    Dead-reckons both endpoints with their VIO deltas, predicts the new
    range from the displaced geometry, then corrects toward the raw
    measurement with a constant gain. Missing VIO on either endpoint
    degrades to a pass-through of the raw range.
    """
    if vio_i is None or vio_j is None:
        return meas.range, replace(state, smoothed=meas.range)
    pi, yi = _advance(state.pos_i, state.yaw_i, vio_i)
    pj, yj = _advance(state.pos_j, state.yaw_j, vio_j)
    prev_geom = math.dist(state.pos_i, state.pos_j)
    new_geom = math.dist(pi, pj)
    predicted = state.smoothed + (new_geom - prev_geom)
    smoothed = max(predicted + state.gain * (meas.range - predicted), 0.0)
    return smoothed, RangeFilterState(
        smoothed=smoothed, pos_i=pi, pos_j=pj, yaw_i=yi, yaw_j=yj,
        gain=state.gain,
    )
