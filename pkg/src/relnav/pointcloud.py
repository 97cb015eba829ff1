"""Point clouds, radius queries and the MAV-presence score.

The score is the concentration statistic used to pin down the orientation
of a graph realization: a MAV-sized cluster at a candidate position makes
the inner-ball count dominate the doubled-radius count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (n, 3) meters
    source_agent: int = -1
    sensor_pose: tuple[float, ...] = (0.0,) * 6  # x, y, z, roll, pitch, yaw

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 3)
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("non-finite points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SpatialIndex:
    cloud: PointCloud
    tree: cKDTree | None = field(repr=False, default=None)


def build_index(cloud: PointCloud) -> SpatialIndex:
    if len(cloud) == 0:
        return SpatialIndex(cloud=cloud, tree=None)
    return SpatialIndex(cloud=cloud, tree=cKDTree(cloud.points))


def radius_search(index: SpatialIndex, center, radius: float) -> np.ndarray:
    """Indices of cloud points inside the closed ball of given radius."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if index.tree is None:
        return np.empty(0, dtype=int)
    idx = index.tree.query_ball_point(np.asarray(center, dtype=float), radius)
    return np.sort(np.asarray(idx, dtype=int))


def mav_presence_score(index: SpatialIndex, candidate, r_mav: float) -> float:
    """Inner-ball count over doubled-radius count plus one.

    High when a MAV-sized point cluster sits at the candidate position,
    near zero over empty space or diffuse structure.
    """
    if r_mav <= 0:
        raise ValueError("r_mav must be > 0")
    inner = len(radius_search(index, candidate, r_mav))
    outer = len(radius_search(index, candidate, 2.0 * r_mav))
    return inner / (outer + 1)


def sphere_cloud(center, radius: float, n_points: int = 80,
                 seed: int = 0) -> np.ndarray:
    """Points sampled uniformly inside a ball, the synthetic stand-in for
    a MAV body whose circumscribed sphere has the given radius."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    v = rng.normal(size=(n_points, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * np.cbrt(rng.uniform(size=(n_points, 1)))
    return np.asarray(center, dtype=float) + r * v


def in_fov(sensor_xy, sensor_yaw: float, target, horizontal_fov: float,
           max_range: float = math.inf, vertical_fov: float = math.pi,
           sensor_z: float = 0.0) -> bool:
    """Wedge test: is the 3D target inside the sensor's field of view."""
    t = np.asarray(target, dtype=float)
    dx, dy = t[0] - sensor_xy[0], t[1] - sensor_xy[1]
    dz = (t[2] - sensor_z) if t.size > 2 else 0.0
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    if dist > max_range:
        return False
    if dist == 0.0:
        return True
    az = math.atan2(dy, dx) - sensor_yaw
    az = (az + math.pi) % (2 * math.pi) - math.pi
    if abs(az) > horizontal_fov / 2:
        return False
    el = math.atan2(dz, math.hypot(dx, dy))
    return abs(el) <= vertical_fov / 2


def render_ugv_cloud(ugv_pose, mav_positions, r_mav: float,
                     horizontal_fov: float, vertical_fov: float,
                     max_range: float = 50.0, source_agent: int = -1,
                     points_per_mav: int = 80, seed: int = 0) -> PointCloud:
    """Synthetic lidar return from a UGV: each MAV inside the FoV wedge is
    rendered as a small sphere of radius r_mav; MAVs outside contribute
    nothing. ugv_pose is (x, y, yaw); MAV positions are 3D world points."""
    x, y, yaw = ugv_pose
    chunks = []
    for k, p in enumerate(mav_positions):
        p = np.asarray(p, dtype=float)
        if in_fov((x, y), yaw, p, horizontal_fov, max_range, vertical_fov):
            chunks.append(sphere_cloud(p, r_mav, points_per_mav,
                                       seed=seed * 1000 + k))
    pts = np.vstack(chunks) if chunks else np.empty((0, 3))
    return PointCloud(points=pts, source_agent=source_agent,
                      sensor_pose=(x, y, 0.0, 0.0, 0.0, yaw))


def save_csv(cloud: PointCloud, path) -> None:
    np.savetxt(path, cloud.points, delimiter=",", header="x,y,z", comments="")


def load_csv(path, source_agent: int = -1) -> PointCloud:
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if pts.size == 0:
        pts = np.empty((0, 3))
    return PointCloud(points=pts, source_agent=source_agent)
