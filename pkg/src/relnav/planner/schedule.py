"""Time scheduling of Dubins tours under the tracker UGV's FoV limit.

Tours carry no timing; this module lays trapezoidal speed profiles over
them and then iteratively slows the angularly-leading MAV wherever the
angular spread seen from the UGV would exceed the horizontal FoV, or
wherever tracking would demand more yaw rate than the UGV has.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dubins import sample_chain
from .grid import FovSpec
from .tspn import Tour


class InfeasiblePlanError(RuntimeError):
    def __init__(self, message: str, interval: tuple[float, float]):
        super().__init__(message)
        self.interval = interval


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled motion of one MAV: columns t, x, y, heading, speed,
    acceleration."""

    mav: int
    samples: np.ndarray
    tour: Tour | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def t(self):
        return self.samples[:, 0]

    @property
    def xy(self):
        return self.samples[:, 1:3]

    @property
    def speed(self):
        return self.samples[:, 4]

    @property
    def accel(self):
        return self.samples[:, 5]

    @property
    def duration(self) -> float:
        return float(self.samples[-1, 0]) if len(self.samples) else 0.0


def wrap_angle_abs(a: float) -> float:
    """Absolute angular difference wrapped to [0, pi]."""
    return abs((a + math.pi) % (2 * math.pi) - math.pi)


def _profile_speeds(s, v_limit, v_max, a_max):
    """Acceleration-limited speed profile over arc-length samples: forward
    and backward passes against the local speed limit, starting and ending
    at rest."""
    n = len(s)
    v = np.minimum(v_limit, v_max).astype(float)
    v[0] = 0.0
    v[-1] = 0.0
    for k in range(n - 1):
        ds = s[k + 1] - s[k]
        v[k + 1] = min(v[k + 1], math.sqrt(v[k] ** 2 + 2 * a_max * ds))
    for k in range(n - 1, 0, -1):
        ds = s[k] - s[k - 1]
        v[k - 1] = min(v[k - 1], math.sqrt(v[k] ** 2 + 2 * a_max * ds))
    return v


_V_FLOOR = 0.02  # m/s; keeps the time integration progressing in holds


def _time_parametrize(chain, v, sample_dt):
    """Resample an arc-length profile at fixed time steps.

    chain columns: s, x, y, heading, curvature. Returns samples with
    columns t, x, y, heading, speed, acceleration.
    """
    s = chain[:, 0]
    n = len(s)
    t = np.zeros(n)
    for k in range(n - 1):
        ds = s[k + 1] - s[k]
        # exact constant-acceleration segment time; guard only against a
        # fully stationary segment, not ordinary slow travel
        v_avg = max(0.5 * (v[k] + v[k + 1]), 1e-6)
        t[k + 1] = t[k] + ds / v_avg
    duration = t[-1]
    times = np.arange(0.0, duration + sample_dt, sample_dt)
    x = np.interp(times, t, chain[:, 1])
    y = np.interp(times, t, chain[:, 2])
    # headings need unwrapping before interpolation
    heading = np.interp(times, t, np.unwrap(chain[:, 3]))
    speed = np.interp(times, t, v)
    accel = np.gradient(speed, times) if len(times) > 1 else np.zeros(1)
    return np.column_stack([times, x, y, heading, speed, accel])


def _bearing(ugv_xy, xy):
    return math.atan2(xy[1] - ugv_xy[1], xy[0] - ugv_xy[0])


def _position_at(traj: Trajectory, time: float):
    tt = traj.t
    if time >= tt[-1]:
        return traj.xy[-1]
    x = np.interp(time, tt, traj.samples[:, 1])
    y = np.interp(time, tt, traj.samples[:, 2])
    return np.array([x, y])


def angular_separation_series(trajs, ugv_pose, sample_dt: float = 0.05):
    """Max pairwise angular distance of MAV bearings from the UGV, sampled
    on a common clock until every trajectory has finished. Finished MAVs
    hold their final position. Returns (times, radians)."""
    if not trajs:
        return np.empty(0), np.empty(0)
    duration = max(tr.duration for tr in trajs)
    times = np.arange(0.0, duration + sample_dt, sample_dt)
    out = np.zeros(len(times))
    ugv_xy = (ugv_pose[0], ugv_pose[1])
    if len(trajs) >= 2:
        for k, t in enumerate(times):
            bearings = [_bearing(ugv_xy, _position_at(tr, t)) for tr in trajs]
            worst = 0.0
            for a in range(len(bearings)):
                for b in range(a + 1, len(bearings)):
                    worst = max(worst, wrap_angle_abs(bearings[a] - bearings[b]))
            out[k] = worst
    return times, out


def _required_yaw_rates(trajs, ugv_xy, sample_dt):
    """Yaw rate the UGV needs to keep its heading on the circular mean of
    the MAV bearings."""
    duration = max(tr.duration for tr in trajs)
    times = np.arange(0.0, duration + sample_dt, sample_dt)
    means = []
    for t in times:
        vecs = [np.array([math.cos(b), math.sin(b)]) for b in
                (_bearing(ugv_xy, _position_at(tr, t)) for tr in trajs)]
        v = np.sum(vecs, axis=0)
        means.append(math.atan2(v[1], v[0]))
    means = np.unwrap(np.asarray(means))
    rates = np.abs(np.gradient(means, times)) if len(times) > 1 else np.zeros(1)
    return times, rates


def _leading_index(bearings, sweep_sign=1.0):
    """Index of the MAV whose bearing leads the widest pair in the sweep
    direction (anticlockwise for sweep_sign=+1)."""
    worst, pair = -1.0, (0, 0)
    for a in range(len(bearings)):
        for b in range(a + 1, len(bearings)):
            sep = wrap_angle_abs(bearings[a] - bearings[b])
            if sep > worst:
                worst, pair = sep, (a, b)
    a, b = pair
    ahead = (bearings[a] - bearings[b]) * sweep_sign % (2 * math.pi)
    return a if ahead < math.pi else b


def schedule_velocities(tours: dict[int, Tour], ugv_pose, fov: FovSpec,
                        v_max: float = 2.0, a_max: float = 1.0,
                        ugv_yaw_rate_max: float = 1.0,
                        sample_dt: float = 0.05, ds: float = 0.02,
                        enforce_fov: bool = True,
                        max_rounds: int = 80) -> dict[int, Trajectory]:
    """Trapezoidal profiles over each tour, slowed where the FoV or yaw
    budget would break.

    tours maps MAV id to its Dubins tour. Enforcement loop: sample all
    trajectories on a common clock; at the worst violating instant, slow
    the angularly-leading MAV's speed limit around the corresponding arc
    position and re-profile. Raises InfeasiblePlanError when rounds run
    out, naming the violating time interval.
    """
    ids = sorted(tours)
    chains = {m: sample_chain(tours[m].paths, step=ds) for m in ids}
    v_limits = {m: np.full(len(chains[m]), float(v_max)) for m in ids}
    ugv_xy = (ugv_pose[0], ugv_pose[1])

    def build():
        out = {}
        for m in ids:
            v = _profile_speeds(chains[m][:, 0], v_limits[m], v_max, a_max)
            out[m] = Trajectory(mav=m, samples=_time_parametrize(
                chains[m], v, sample_dt), tour=tours[m])
        return out

    trajs = build()
    if not enforce_fov or len(ids) < 2:
        if enforce_fov and len(ids) >= 1:
            trajs = _enforce_yaw_budget(trajs, chains, v_limits, ids, ugv_xy,
                                        ugv_yaw_rate_max, v_max, a_max,
                                        sample_dt, build)
        return trajs

    for _ in range(max_rounds):
        tlist = [trajs[m] for m in ids]
        times, seps = angular_separation_series(tlist, ugv_pose, sample_dt)
        _, rates = _required_yaw_rates(tlist, ugv_xy, sample_dt)
        rates = rates[: len(times)]
        viol = (seps > fov.horizontal_fov) | (rates > ugv_yaw_rate_max)
        if not np.any(viol):
            return trajs
        k = int(np.argmax(np.where(viol, seps, -1.0)))
        t_bad = times[k]
        bearings = [_bearing(ugv_xy, _position_at(tr, t_bad)) for tr in tlist]
        if seps[k] > fov.horizontal_fov:
            lead = ids[_leading_index(bearings)]
        else:
            # yaw-rate violation: slow whichever MAV's own bearing is
            # changing fastest, since bearing rate scales with its speed
            eps = sample_dt
            before = [_bearing(ugv_xy, _position_at(tr, max(t_bad - eps, 0.0)))
                      for tr in tlist]
            own = [wrap_angle_abs(b1 - b0) / eps
                   for b0, b1 in zip(before, bearings)]
            lead = ids[int(np.argmax(own))]
        # slow the leader around its arc position at the violation; if
        # that stretch is already at the floor, push the hold upstream
        t_axis, s_axis = _time_axis(chains[lead], v_limits[lead], v_max, a_max)
        s_bad = float(np.interp(t_bad, t_axis, s_axis))
        window = (s_axis > s_bad - 1.0) & (s_axis < s_bad + 0.5)
        if not np.any(window) or np.all(v_limits[lead][window] <= _V_FLOOR + 1e-9):
            window = s_axis <= s_bad + 0.5
        if np.all(v_limits[lead][window] <= _V_FLOOR + 1e-9):
            break  # leader cannot be slowed further: deadlock
        v_limits[lead][window] = np.maximum(
            v_limits[lead][window] * 0.6, _V_FLOOR)
        trajs = build()

    times, seps = angular_separation_series([trajs[m] for m in ids],
                                            ugv_pose, sample_dt)
    _, rates = _required_yaw_rates([trajs[m] for m in ids], ugv_xy, sample_dt)
    bad = np.flatnonzero((seps > fov.horizontal_fov)
                         | (rates[: len(seps)] > ugv_yaw_rate_max))
    lo = float(times[bad[0]]) if bad.size else 0.0
    hi = float(times[bad[-1]]) if bad.size else 0.0
    raise InfeasiblePlanError(
        f"cannot keep MAVs inside the FoV over t in [{lo:.2f}, {hi:.2f}] s",
        interval=(lo, hi))


def _time_axis(chain, v_limit, v_max, a_max):
    """(t, s) mapping for a chain under its current speed limits."""
    s = chain[:, 0]
    v = _profile_speeds(s, v_limit, v_max, a_max)
    t = np.zeros(len(s))
    for k in range(len(s) - 1):
        ds = s[k + 1] - s[k]
        t[k + 1] = t[k] + ds / max(0.5 * (v[k] + v[k + 1]), 1e-6)
    return t, s


def _enforce_yaw_budget(trajs, chains, v_limits, ids, ugv_xy,
                        ugv_yaw_rate_max, v_max, a_max, sample_dt, build):
    """Single-MAV case: only the UGV yaw-rate bound can bind."""
    for _ in range(40):
        tlist = [trajs[m] for m in ids]
        times, rates = _required_yaw_rates(tlist, ugv_xy, sample_dt)
        viol = rates > ugv_yaw_rate_max
        if not np.any(viol):
            return trajs
        t_bad = float(times[int(np.argmax(rates))])
        m = ids[0]
        t_axis, s_axis = _time_axis(chains[m], v_limits[m], v_max, a_max)
        s_bad = float(np.interp(t_bad, t_axis, s_axis))
        window = (chains[m][:, 0] > s_bad - 1.0) & (chains[m][:, 0] < s_bad + 0.5)
        if not np.any(window):
            return trajs
        v_limits[m][window] *= 0.6
        v_limits[m] = np.maximum(v_limits[m], _V_FLOOR)
        trajs = build()
    return trajs
