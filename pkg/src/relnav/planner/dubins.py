"""Shortest curvature-bounded paths between oriented configurations.

The optimum is always one of six segment words (LSL, RSR, LSR, RSL, RLR,
LRL); each candidate is solved in closed form in units of the turning
radius and the cheapest feasible word wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def angle_mod(theta: float) -> float:
    return (theta + math.pi) % (2 * math.pi) - math.pi


def _lsl(alpha, beta, d):
    tmp0 = d + math.sin(alpha) - math.sin(beta)
    tmp1 = math.cos(beta) - math.cos(alpha)
    p_sq = tmp0 * tmp0 + tmp1 * tmp1
    if p_sq < 0:
        return None
    ang = math.atan2(tmp1, tmp0)
    return (angle_mod(ang - alpha) % (2 * math.pi), math.sqrt(p_sq),
            angle_mod(beta - ang) % (2 * math.pi))


def _rsr(alpha, beta, d):
    tmp0 = d - math.sin(alpha) + math.sin(beta)
    tmp1 = math.cos(alpha) - math.cos(beta)
    p_sq = tmp0 * tmp0 + tmp1 * tmp1
    if p_sq < 0:
        return None
    ang = math.atan2(tmp1, tmp0)
    return (angle_mod(alpha - ang) % (2 * math.pi), math.sqrt(p_sq),
            angle_mod(ang - beta) % (2 * math.pi))


def _lsr(alpha, beta, d):
    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) + 2 * d * (
        math.sin(alpha) + math.sin(beta))
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    ang = math.atan2(-math.cos(alpha) - math.cos(beta),
                     d + math.sin(alpha) + math.sin(beta)) - math.atan2(-2.0, p)
    return (angle_mod(ang - alpha) % (2 * math.pi), p,
            angle_mod(ang - beta) % (2 * math.pi))


def _rsl(alpha, beta, d):
    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) - 2 * d * (
        math.sin(alpha) + math.sin(beta))
    if p_sq < 0:
        return None
    p = math.sqrt(p_sq)
    ang = math.atan2(math.cos(alpha) + math.cos(beta),
                     d - math.sin(alpha) - math.sin(beta)) - math.atan2(2.0, p)
    return (angle_mod(alpha - ang) % (2 * math.pi), p,
            angle_mod(beta - ang) % (2 * math.pi))


def _rlr(alpha, beta, d):
    tmp = (6.0 - d * d + 2 * math.cos(alpha - beta)
           + 2 * d * (math.sin(alpha) - math.sin(beta))) / 8.0
    if abs(tmp) > 1:
        return None
    p = (2 * math.pi - math.acos(tmp)) % (2 * math.pi)
    t = angle_mod(alpha - math.atan2(
        math.cos(alpha) - math.cos(beta),
        d - math.sin(alpha) + math.sin(beta)) + p / 2.0) % (2 * math.pi)
    q = angle_mod(alpha - beta - t + p) % (2 * math.pi)
    return t, p, q


def _lrl(alpha, beta, d):
    tmp = (6.0 - d * d + 2 * math.cos(alpha - beta)
           + 2 * d * (math.sin(beta) - math.sin(alpha))) / 8.0
    if abs(tmp) > 1:
        return None
    p = (2 * math.pi - math.acos(tmp)) % (2 * math.pi)
    t = angle_mod(-alpha + math.atan2(
        -math.cos(alpha) + math.cos(beta),
        d + math.sin(alpha) - math.sin(beta)) + p / 2.0) % (2 * math.pi)
    q = angle_mod(beta - alpha - t + p) % (2 * math.pi)
    return t, p, q


_WORDS = {
    "LSL": (_lsl, "LSL"),
    "RSR": (_rsr, "RSR"),
    "LSR": (_lsr, "LSR"),
    "RSL": (_rsl, "RSL"),
    "RLR": (_rlr, "RLR"),
    "LRL": (_lrl, "LRL"),
}


@dataclass(frozen=True)
class DubinsPath:
    word: str
    params: tuple[float, float, float]  # segment lengths in units of rho
    rho: float
    q0: tuple[float, float, float]
    q1: tuple[float, float, float]

    @property
    def length(self) -> float:
        return sum(self.params) * self.rho

    def sample(self, step: float = 0.05) -> np.ndarray:
        """Sample (x, y, heading, curvature) along the path at roughly the
        requested arc-length spacing; the endpoint is always included."""
        out = []
        x, y, th = self.q0
        for seg, span in zip(self.word, self.params):
            seg_len = span * self.rho
            n = max(int(math.ceil(seg_len / step)), 1)
            if seg == "S":
                kappa = 0.0
            elif seg == "L":
                kappa = 1.0 / self.rho
            else:
                kappa = -1.0 / self.rho
            for k in range(n):
                ds = seg_len / n
                out.append((x, y, th, kappa))
                if seg == "S":
                    x += ds * math.cos(th)
                    y += ds * math.sin(th)
                else:
                    dth = ds * kappa
                    x += (math.sin(th + dth) - math.sin(th)) / kappa
                    y += (-math.cos(th + dth) + math.cos(th)) / kappa
                    th += dth
        out.append((x, y, th, 0.0))
        return np.asarray(out)


def dubins_shortest(q0, q1, rho: float) -> DubinsPath:
    """Cheapest of the six candidate words joining two configurations."""
    if rho <= 0:
        raise ValueError("turning radius must be > 0")
    x0, y0, yaw0 = q0
    x1, y1, yaw1 = q1
    dx, dy = x1 - x0, y1 - y0
    d = math.hypot(dx, dy) / rho
    theta = math.atan2(dy, dx) if (dx or dy) else 0.0
    alpha = angle_mod(yaw0 - theta)
    beta = angle_mod(yaw1 - theta)
    best = None
    for fn, word in _WORDS.values():
        res = fn(alpha, beta, d)
        if res is None:
            continue
        total = sum(res)
        if best is None or total < best[0]:
            best = (total, word, res)
    _, word, params = best
    return DubinsPath(word=word, params=tuple(params), rho=rho,
                     q0=(float(x0), float(y0), float(yaw0)),
                     q1=(float(x1), float(y1), float(yaw1)))


def sample_chain(paths, step: float = 0.05) -> np.ndarray:
    """Concatenated samples (s, x, y, heading, curvature) over a chain of
    Dubins paths, with cumulative arc length in the first column."""
    rows = []
    s0 = 0.0
    for k, path in enumerate(paths):
        pts = path.sample(step)
        if k > 0:
            pts = pts[1:]  # drop duplicated junction sample
        d = np.hypot(np.diff(pts[:, 0], prepend=pts[0, 0]),
                     np.diff(pts[:, 1], prepend=pts[0, 1]))
        s = s0 + np.cumsum(d)
        rows.append(np.column_stack([s, pts]))
        s0 = s[-1]
    if not rows:
        return np.empty((0, 5))
    return np.vstack(rows)
