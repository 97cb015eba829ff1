"""Per-MAV traveling-salesman-with-neighborhoods tour construction.

The visit order comes in fixed (the anticlockwise arc assignment); this
module picks one touch point inside each disk and smooths the tour with
Dubins paths. A baseline mode may reorder freely with 2-opt, which is the
unconstrained comparison solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dubins import DubinsPath, dubins_shortest
from .grid import Neighborhood


@dataclass(frozen=True)
class Tour:
    nbh_ids: tuple[int, ...]
    touch_points: tuple[tuple[float, float], ...]
    headings: tuple[float, ...]
    paths: tuple[DubinsPath, ...]
    length: float
    start: tuple[float, float, float]


def _toward(center, radius, from_point):
    """Boundary point of the disk facing from_point (center if radius 0)."""
    dx = from_point[0] - center[0]
    dy = from_point[1] - center[1]
    d = math.hypot(dx, dy)
    if radius == 0.0 or d == 0.0:
        return (center[0], center[1])
    return (center[0] + radius * dx / d, center[1] + radius * dy / d)


def _headings(start_xy, points):
    """Through-point headings: each aims from the previous waypoint toward
    the next one; the last keeps its incoming direction."""
    n = len(points)
    out = []
    for k in range(n):
        prev = points[k - 1] if k > 0 else start_xy
        nxt = points[k + 1] if k < n - 1 else None
        if nxt is None:
            dx, dy = points[k][0] - prev[0], points[k][1] - prev[1]
        else:
            dx, dy = nxt[0] - prev[0], nxt[1] - prev[1]
        if dx == 0.0 and dy == 0.0:
            out.append(out[-1] if out else 0.0)
        else:
            out.append(math.atan2(dy, dx))
    return out


def _chain(start_config, points, headings, rho):
    paths = []
    cfg = start_config
    for p, h in zip(points, headings):
        nxt = (p[0], p[1], h)
        paths.append(dubins_shortest(cfg, nxt, rho))
        cfg = nxt
    return paths, sum(p.length for p in paths)


def _two_opt(order, nbhs, start_xy):
    """Euclidean-chain 2-opt over the center visit order."""
    centers = [nbhs[i].center for i in order]

    def chain_len(seq):
        total, prev = 0.0, start_xy
        for i in seq:
            c = nbhs[i].center
            total += math.dist(prev, c)
            prev = c
        return total

    best = list(order)
    best_len = chain_len(best)
    improved = True
    while improved:
        improved = False
        for a in range(len(best) - 1):
            for b in range(a + 1, len(best)):
                trial = best[:a] + best[a:b + 1][::-1] + best[b + 1:]
                tl = chain_len(trial)
                if tl < best_len - 1e-12:
                    best, best_len = trial, tl
                    improved = True
    return best


def solve_tspn(nbhs: list[Neighborhood], start_config, rho: float,
               refine_rounds: int = 3, allow_reorder: bool = False) -> Tour:
    """Build a Dubins tour touching every disk.

    The input order is kept verbatim unless allow_reorder is set (baseline
    mode), in which case a pure length-minimizing 2-opt over the centers
    runs first. Touch points start at the disk boundary facing the
    incoming leg and are refined by coordinate descent over the boundary
    angle against the local Dubins detour.
    """
    if not nbhs:
        raise ValueError("need at least one neighborhood")
    start_xy = (start_config[0], start_config[1])
    order = list(range(len(nbhs)))
    if allow_reorder and len(nbhs) > 1:
        order = _two_opt(order, nbhs, start_xy)
    seq = [nbhs[i] for i in order]

    def reach(nb):
        # aim slightly inside the boundary so that a time-discretized
        # trajectory cannot graze past the disk without entering it
        return max(nb.radius - min(0.02, nb.radius / 4.0), 0.0)

    points = []
    prev = start_xy
    for nb in seq:
        tp = _toward(nb.center, reach(nb), prev)
        points.append(tp)
        prev = tp

    def tour_of(points):
        headings = _headings(start_xy, points)
        paths, length = _chain(start_config, points, headings, rho)
        return headings, paths, length

    headings, paths, length = tour_of(points)

    for _ in range(refine_rounds):
        changed = False
        for k, nb in enumerate(seq):
            if nb.radius == 0.0:
                continue
            best_local = length
            best_tp = points[k]
            r_eff = reach(nb)
            # coarse scan over the boundary, then a bisection refinement
            phis = [2 * math.pi * j / 24 for j in range(24)]
            for phi in phis:
                cand = (nb.center[0] + r_eff * math.cos(phi),
                        nb.center[1] + r_eff * math.sin(phi))
                trial = points.copy()
                trial[k] = cand
                _, _, tl = tour_of(trial)
                if tl < best_local - 1e-9:
                    best_local, best_tp = tl, cand
            phi0 = math.atan2(best_tp[1] - nb.center[1],
                              best_tp[0] - nb.center[0])
            width = 2 * math.pi / 24
            for _ in range(20):
                width *= 0.5
                for phi in (phi0 - width, phi0 + width):
                    cand = (nb.center[0] + r_eff * math.cos(phi),
                            nb.center[1] + r_eff * math.sin(phi))
                    trial = points.copy()
                    trial[k] = cand
                    _, _, tl = tour_of(trial)
                    if tl < best_local - 1e-12:
                        best_local, best_tp, phi0 = tl, cand, phi
            if best_tp != points[k]:
                points[k] = best_tp
                headings, paths, length = tour_of(points)
                changed = True
        if not changed:
            break

    return Tour(
        nbh_ids=tuple(nb.id for nb in seq),
        touch_points=tuple(points),
        headings=tuple(headings),
        paths=tuple(paths),
        length=length,
        start=(float(start_config[0]), float(start_config[1]),
               float(start_config[2])),
    )
