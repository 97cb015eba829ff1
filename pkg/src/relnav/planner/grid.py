"""Occupancy grid, lidar shadow extraction, coverage neighborhoods.

A neighborhood is a disk over a connected region the UGV's lidar cannot
see because an obstacle blocks the ray: the blind spots the MAVs are sent
to survey.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

FREE, OBSTACLE, UNKNOWN = 0, 1, 2


class InvalidScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class FovSpec:
    horizontal_fov: float
    vertical_fov: float = math.radians(25.1)
    max_range: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.horizontal_fov <= 2 * math.pi:
            raise ValueError("horizontal_fov must be in (0, 2*pi]")


@dataclass(frozen=True)
class Neighborhood:
    id: int
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        # radius 0 is the degenerate point-visit case used in tests;
        # shadow extraction always produces radius >= grid resolution
        if self.radius < 0:
            raise ValueError("neighborhood radius must be >= 0")

    def contains(self, point) -> bool:
        return math.dist(self.center, point) <= self.radius


@dataclass(frozen=True)
class OccupancyGrid:
    """Row-major cell grid; cell (r, c) center sits at
    origin + ((c + 0.5), (r + 0.5)) * resolution."""

    cells: np.ndarray
    resolution: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2D array")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def shape(self):
        return self.cells.shape

    def cell_at(self, point) -> tuple[int, int]:
        c = int(math.floor((point[0] - self.origin[0]) / self.resolution))
        r = int(math.floor((point[1] - self.origin[1]) / self.resolution))
        return r, c

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.cells.shape[0] and 0 <= c < self.cells.shape[1]

    def cell_center(self, r: int, c: int) -> tuple[float, float]:
        return (self.origin[0] + (c + 0.5) * self.resolution,
                self.origin[1] + (r + 0.5) * self.resolution)


def _inside_hull(point, hull_points) -> bool:
    pts = np.asarray(hull_points, float)
    if len(pts) < 3:
        return False
    from scipy.spatial import Delaunay, QhullError

    try:
        tri = Delaunay(pts)
    except QhullError:
        return False
    return tri.find_simplex(np.asarray(point, float)) >= 0


def blind_spot_neighborhoods(grid: OccupancyGrid, ugv_pose, fov: FovSpec,
                             ugv_positions=None) -> list[Neighborhood]:
    """Shadow regions of the UGV's horizontal FoV wedge as disks.

    Rays are cast from the UGV across the wedge; free/unknown cells behind
    the first obstacle hit along a ray are shadow cells. Connected shadow
    components become neighborhoods centered at the component centroid
    with the inscribed-circle radius (floored at one cell). Components
    whose center falls inside the convex hull of the UGV positions are
    dropped with a warning.
    """
    x, y, yaw = ugv_pose
    r0, c0 = grid.cell_at((x, y))
    if grid.in_bounds(r0, c0) and grid.cells[r0, c0] == OBSTACLE:
        raise InvalidScenarioError("UGV pose lies inside an obstacle cell")
    if not np.any(grid.cells == OBSTACLE):
        return []

    shadow = np.zeros(grid.shape, dtype=bool)
    step = grid.resolution / 2.0
    n_steps = int(fov.max_range / step)
    dang = grid.resolution / fov.max_range / 2.0
    half = fov.horizontal_fov / 2.0
    angles = np.arange(-half, half + dang, dang) + yaw
    for ang in angles:
        dx, dy = math.cos(ang) * step, math.sin(ang) * step
        px, py = x, y
        blocked = False
        for _ in range(n_steps):
            px += dx
            py += dy
            r, c = grid.cell_at((px, py))
            if not grid.in_bounds(r, c):
                break
            if grid.cells[r, c] == OBSTACLE:
                blocked = True
            elif blocked:
                shadow[r, c] = True

    labels, n_comp = ndimage.label(shadow, structure=np.ones((3, 3)))
    out = []
    nid = 0
    for comp in range(1, n_comp + 1):
        mask = labels == comp
        rows, cols = np.nonzero(mask)
        cy = grid.origin[1] + (rows.mean() + 0.5) * grid.resolution
        cx = grid.origin[0] + (cols.mean() + 0.5) * grid.resolution
        dist = ndimage.distance_transform_edt(mask)
        radius = max(float(dist.max()) * grid.resolution, grid.resolution)
        if ugv_positions is not None and _inside_hull((cx, cy), ugv_positions):
            warnings.warn(
                f"dropping shadow region at ({cx:.2f}, {cy:.2f}): inside "
                "the UGV hull", stacklevel=2)
            continue
        out.append(Neighborhood(id=nid, center=(cx, cy), radius=radius))
        nid += 1
    return out
