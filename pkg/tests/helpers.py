"""Shared test oracles."""

import numpy as np


def align(est, truth, allow_reflection=True):
    """Optimal rototranslation (optionally with reflection) of est onto
    truth; returns the aligned points. Independent Procrustes/Kabsch
    oracle used to compare gauge-free reconstructions."""
    est = np.asarray(est, float)
    truth = np.asarray(truth, float)
    ce, ct = est.mean(axis=0), truth.mean(axis=0)
    A, B = est - ce, truth - ct
    U, _, Vt = np.linalg.svd(A.T @ B)
    R = U @ Vt
    if not allow_reflection and np.linalg.det(R) < 0:
        U2 = U.copy()
        U2[:, -1] *= -1
        R = U2 @ Vt
    return A @ R + ct


def alignment_error(est, truth, allow_reflection=True):
    aligned = align(est, truth, allow_reflection)
    return np.linalg.norm(aligned - np.asarray(truth, float), axis=1)


def noiseless_ranges(points, edges):
    """Exact pairwise ranges for the given edges."""
    from relnav.sensors import RangeMeasurement

    pts = np.asarray(points, float)
    out = []
    for i, j in edges:
        out.append(RangeMeasurement(
            edge=(min(i, j), max(i, j)),
            range=float(np.linalg.norm(pts[i] - pts[j])),
            timestamp=0.0,
        ))
    return out


def complete_edges(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]
