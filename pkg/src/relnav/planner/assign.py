"""Workload assignment: MAVs to tracker UGVs, neighborhoods to MAVs.

Neighborhood partitioning works on the circle of polar angles around the
tracker UGV: each MAV gets one contiguous angular arc, swept
anticlockwise, with arc boundaries moved locally until no single move
shrinks the worst per-MAV tour-length estimate.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import Neighborhood


def assign_mavs_to_ugvs(mav_positions, ugv_positions) -> list[int]:
    """Nearest-UGV assignment (ties to the lower UGV index), rebalanced so
    every UGV tracks at least one MAV."""
    n_mav, n_ugv = len(mav_positions), len(ugv_positions)
    if not (n_mav >= n_ugv >= 1):
        raise ValueError(
            f"need n_mav >= n_ugv >= 1, got {n_mav} MAVs / {n_ugv} UGVs")
    mav = np.asarray(mav_positions, float)[:, :2]
    ugv = np.asarray(ugv_positions, float)[:, :2]
    d = np.linalg.norm(mav[:, None] - ugv[None], axis=2)
    assignment = list(np.argmin(d, axis=1))  # argmin breaks ties low

    def counts():
        out = [0] * n_ugv
        for a in assignment:
            out[a] += 1
        return out

    while True:
        c = counts()
        starved = [u for u in range(n_ugv) if c[u] == 0]
        if not starved:
            break
        target = starved[0]
        donor = max(range(n_ugv), key=lambda u: (c[u], -u))
        # move the donor's farthest-assigned MAV
        cands = [k for k in range(n_mav) if assignment[k] == donor]
        moved = max(cands, key=lambda k: (d[k, donor], -k))
        assignment[moved] = target
    return assignment


def _polar(point, ugv_pose) -> tuple[float, float]:
    dx = point[0] - ugv_pose[0]
    dy = point[1] - ugv_pose[1]
    return math.atan2(dy, dx) % (2 * math.pi), math.hypot(dx, dy)


def _chain_length(start, centers) -> float:
    total = 0.0
    prev = np.asarray(start[:2], float)
    for c in centers:
        c = np.asarray(c, float)
        total += float(np.linalg.norm(c - prev))
        prev = c
    return total


def assign_neighborhoods(nbhs: list[Neighborhood], mav_start_positions,
                         ugv_pose, max_moves: int = 200,
                         ) -> list[list[Neighborhood]]:
    """Partition neighborhoods into per-MAV anticlockwise arcs.

    Returns one ordered list per MAV (index-aligned with the input MAV
    order); ordering inside each arc is the anticlockwise sweep starting
    at the arc's first element. Tie angles order by neighborhood id.
    """
    if not mav_start_positions:
        raise ValueError("need at least one MAV")
    if not nbhs:
        return [[] for _ in mav_start_positions]
    k = len(mav_start_positions)
    ordered = sorted(nbhs, key=lambda n: (_polar(n.center, ugv_pose)[0], n.id))
    n = len(ordered)
    if k == 1:
        return [ordered]

    mav_angles = [_polar(p, ugv_pose)[0] for p in mav_start_positions]
    mav_order = sorted(range(k), key=lambda i: (mav_angles[i], i))

    def cost(bounds, offset):
        """Max estimated tour length over MAVs for a circular partition.

        bounds are k cut positions into the ordered circular list; arc t
        (starting at cut t) is served by the MAV at circular rank t+offset.
        """
        worst = 0.0
        for t in range(k):
            lo, hi = bounds[t], bounds[(t + 1) % k]
            idxs = list(range(lo, hi)) if lo <= hi else \
                list(range(lo, n)) + list(range(0, hi))
            mav_i = mav_order[(t + offset) % k]
            centers = [ordered[i].center for i in idxs]
            worst = max(worst, _chain_length(
                mav_start_positions[mav_i], centers))
        return worst

    # initial cuts: near-equal consecutive runs
    bounds = [round(t * n / k) % n for t in range(k)]
    if len(set(bounds)) < k:
        bounds = list(range(k))
    best_offset = min(range(k), key=lambda o: cost(bounds, o))
    best = cost(bounds, best_offset)
    for _ in range(max_moves):
        improved = False
        for t in range(k):
            for delta in (-1, 1):
                trial = bounds.copy()
                trial[t] = (trial[t] + delta) % n
                if len(set(trial)) < k:
                    continue
                for o in range(k):
                    c = cost(trial, o)
                    if c < best - 1e-12:
                        bounds, best_offset, best = trial, o, c
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            break

    result: list[list[Neighborhood]] = [[] for _ in range(k)]
    for t in range(k):
        lo, hi = bounds[t], bounds[(t + 1) % k]
        idxs = list(range(lo, hi)) if lo <= hi else \
            list(range(lo, n)) + list(range(0, hi))
        mav_i = mav_order[(t + best_offset) % k]
        result[mav_i] = [ordered[i] for i in idxs]
    return result
