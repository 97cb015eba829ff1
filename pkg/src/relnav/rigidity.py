"""Graph connectivity and planar rigidity analysis.

A team's ranging topology is an undirected graph; pairing it with the 2D
positions of the agents gives a framework. Localization is only well posed
when that framework is infinitesimally rigid, which we certify through the
rank of the rigidity matrix (2N-3 in the plane) and monitor at runtime
through the rigidity eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EmptyGraphError(ValueError):
    pass


class InvalidFrameworkError(ValueError):
    pass


def _canonical_edges(edges) -> tuple[tuple[int, int], ...]:
    out = set()
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop on vertex {i}")
        out.add((min(i, j), max(i, j)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 0..n_vertices-1, no self-loops."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n_vertices < 0:
            raise ValueError("n_vertices must be >= 0")
        canon = _canonical_edges(self.edges)
        for i, j in canon:
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(f"edge ({i},{j}) out of range")
        object.__setattr__(self, "edges", canon)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, i: int) -> int:
        return sum(1 for a, b in self.edges if a == i or b == i)


@dataclass(frozen=True)
class Framework:
    """A graph together with stacked planar positions (length 2N, meters)."""

    graph: Graph
    positions: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float).ravel()
        if p.size != 2 * self.graph.n_vertices:
            raise InvalidFrameworkError(
                f"expected {2 * self.graph.n_vertices} coordinates, got {p.size}"
            )
        if not np.all(np.isfinite(p)):
            raise InvalidFrameworkError("non-finite coordinates")
        p.setflags(write=False)
        object.__setattr__(self, "positions", p)

    @property
    def points(self) -> np.ndarray:
        """Positions as an (N, 2) array."""
        return self.positions.reshape(-1, 2)


@dataclass(frozen=True)
class RigidityReport:
    laplacian_lambda2: float
    rigidity_rank: int
    rigidity_eigenvalue: float
    is_connected: bool
    is_rigid: bool
    degenerate: bool = field(default=False)


def laplacian(graph: Graph) -> np.ndarray:
    """Graph Laplacian L = degree matrix minus adjacency matrix."""
    n = graph.n_vertices
    L = np.zeros((n, n))
    for i, j in graph.edges:
        L[i, i] += 1.0
        L[j, j] += 1.0
        L[i, j] -= 1.0
        L[j, i] -= 1.0
    return L


def is_connected(graph: Graph, tol: float = 1e-9) -> tuple[bool, float]:
    """Connectivity via the Fiedler value: connected iff lambda2(L) > tol.

    Returns (flag, lambda2).
    """
    if graph.n_vertices == 0:
        raise EmptyGraphError("connectivity undefined for the empty graph")
    if graph.n_vertices == 1:
        return True, 0.0
    eigvals = np.linalg.eigvalsh(laplacian(graph))
    lam2 = float(eigvals[1])
    return lam2 > tol, lam2


def rigidity_matrix(fw: Framework) -> np.ndarray:
    """Jacobian of the squared-distance edge constraints, shape |E| x 2N.

    Row for edge (i,j) carries 2(p_i - p_j) in vertex i's columns and the
    negation in vertex j's columns.
    """
    pts = fw.points
    m = fw.graph.n_edges
    R = np.zeros((m, 2 * fw.graph.n_vertices))
    for row, (i, j) in enumerate(fw.graph.edges):
        d = 2.0 * (pts[i] - pts[j])
        R[row, 2 * i : 2 * i + 2] = d
        R[row, 2 * j : 2 * j + 2] = -d
    return R


RANK_RTOL = 1e-9  # singular values count against 1e-9 * sigma_max
DEFAULT_EIG_TOL = 1e-6


def rigidity_report(fw: Framework, tol: float = DEFAULT_EIG_TOL) -> RigidityReport:
    """Full rigidity assessment of a planar framework.

    The rigidity eigenvalue is the 4th-smallest eigenvalue of R^T R: the
    first spectrum value above the 3-dimensional trivial kernel spanned by
    translations and the infinitesimal rotation. Positive iff the rank
    condition rank(R) = 2N-3 holds.
    """
    n = fw.graph.n_vertices
    connected, lam2 = is_connected(fw.graph)
    if n < 3:
        # too few agents for a planar rigidity test; report as degenerate
        return RigidityReport(
            laplacian_lambda2=lam2,
            rigidity_rank=0,
            rigidity_eigenvalue=0.0,
            is_connected=connected,
            is_rigid=False,
            degenerate=True,
        )
    R = rigidity_matrix(fw)
    sv = np.linalg.svd(R, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > RANK_RTOL * smax)) if smax > 0 else 0
    eigvals = np.linalg.eigvalsh(R.T @ R)
    rig_eig = float(max(eigvals[3], 0.0))
    rigid = rank == 2 * n - 3
    return RigidityReport(
        laplacian_lambda2=lam2,
        rigidity_rank=rank,
        rigidity_eigenvalue=rig_eig,
        is_connected=connected,
        is_rigid=rigid and connected,
    )
