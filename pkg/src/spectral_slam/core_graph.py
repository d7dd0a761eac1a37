"""Pose-graph data model and exact Laplacian-family matrix constructions.

Edges are stored directed (measurement direction) but every spectral
construction here treats the graph as undirected: an edge contributes the
same rank-one term regardless of orientation. Parallel edges accumulate
additively.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

# An eigenvalue counts as "zero" when <= REL_ZERO_TOL * max(largest, 1.0).
REL_ZERO_TOL = 1e-9

SYM_TOL = 1e-12
QUAT_NORM_TOL = 1e-9


class GraphError(ValueError):
    """Invalid graph structure or construction argument."""


@dataclass(frozen=True)
class Vertex:
    """A robot pose node. ``pose`` is (x, y, theta) in 2D or
    (x, y, z, qx, qy, qz, qw) in 3D; None when the dataset omits it."""

    id: int
    pose: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.id < 0:
            raise GraphError(f"vertex id must be non-negative, got {self.id}")
        if self.pose is not None and len(self.pose) == 7:
            qnorm = float(np.linalg.norm(self.pose[3:7]))
            if abs(qnorm - 1.0) > QUAT_NORM_TOL:
                raise GraphError(
                    f"vertex {self.id}: quaternion norm {qnorm} not unit"
                )


@dataclass(frozen=True)
class Edge:
    """A relative-pose constraint between two vertices carrying an
    ell x ell information matrix (inverse measurement covariance)."""

    src: int
    dst: int
    info: np.ndarray
    relative_pose: tuple[float, ...] | None = None
    pd_flag: bool = True  # False marks a non-PD info matrix kept from a dataset

    def __post_init__(self):
        if self.src == self.dst:
            raise GraphError(f"self-loop on vertex {self.src}")
        info = np.asarray(self.info, dtype=float)
        if info.ndim != 2 or info.shape[0] != info.shape[1]:
            raise GraphError(f"info matrix must be square, got {info.shape}")
        if info.shape[0] not in (3, 6):
            raise GraphError(f"info matrix dim must be 3 or 6, got {info.shape[0]}")
        scale = max(float(np.abs(info).max()), 1.0)
        if np.abs(info - info.T).max() > SYM_TOL * scale:
            raise GraphError(f"info matrix of edge ({self.src},{self.dst}) not symmetric")
        object.__setattr__(self, "info", info)

    @property
    def ell(self) -> int:
        return self.info.shape[0]


@dataclass(frozen=True)
class PoseGraph:
    """Immutable pose-graph: n vertices (dense ids 0..n-1), m directed edges
    sharing one block dimension ell."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    source_ids: dict[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        n = len(self.vertices)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        ids = [v.id for v in self.vertices]
        if ids != list(range(n)):
            raise GraphError("vertex ids must be dense 0..n-1 in order")
        ells = {e.ell for e in self.edges}
        if len(ells) > 1:
            raise GraphError(f"edges mix block dimensions {sorted(ells)}")
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise GraphError(f"edge ({e.src},{e.dst}) references missing vertex")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def ell(self) -> int:
        """Block dimension; 3 for an edgeless graph by convention."""
        return self.edges[0].ell if self.edges else 3


@dataclass(frozen=True)
class LaplacianMatrix:
    """Symmetric PSD (weighted) Laplacian with the weight scheme that built it."""

    matrix: np.ndarray
    scheme: str = "unit"

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def adjacency_matrix(g: PoseGraph) -> np.ndarray:
    """Binary symmetric adjacency: 1 iff some edge joins i and k."""
    a = np.zeros((g.n, g.n), dtype=int)
    for e in g.edges:
        a[e.src, e.dst] = 1
        a[e.dst, e.src] = 1
    return a


def incidence_matrix(g: PoseGraph) -> np.ndarray:
    """Signed n x m incidence matrix: column j is +1 at src, -1 at dst."""
    q = np.zeros((g.n, g.m), dtype=int)
    for j, e in enumerate(g.edges):
        q[e.src, j] = 1
        q[e.dst, j] = -1
    return q


def laplacian(g: PoseGraph, weights=None) -> LaplacianMatrix:
    """(Weighted) graph Laplacian. ``weights``: positive per-edge scalars
    (unit weights when None); parallel edges accumulate additively."""
    if weights is None:
        w = np.ones(g.m)
        scheme = "unit"
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (g.m,):
            raise GraphError(f"expected {g.m} weights, got shape {w.shape}")
        if np.any(w <= 0):
            raise GraphError("edge weights must be positive")
        scheme = "weighted"
    lap = np.zeros((g.n, g.n))
    for j, e in enumerate(g.edges):
        lap[e.src, e.src] += w[j]
        lap[e.dst, e.dst] += w[j]
        lap[e.src, e.dst] -= w[j]
        lap[e.dst, e.src] -= w[j]
    return LaplacianMatrix(lap, scheme)


def laplacian_from_edge_list(n: int, edge_list, weights, scheme="weighted") -> LaplacianMatrix:
    """Weighted Laplacian straight from (i, k) pairs; used by graph hallucination."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise GraphError("edge weights must be positive")
    lap = np.zeros((n, n))
    for (i, k), wj in zip(edge_list, w):
        if i == k:
            raise GraphError(f"self-loop on vertex {i}")
        lap[i, i] += wj
        lap[k, k] += wj
        lap[i, k] -= wj
        lap[k, i] -= wj
    return LaplacianMatrix(lap, scheme)


def reduced_laplacian(lap: LaplacianMatrix, drop: int = 0) -> np.ndarray:
    """Laplacian with row/column ``drop`` removed; its determinant is
    drop-independent (matrix-tree theorem)."""
    n = lap.size
    if n < 2:
        raise GraphError("reduced Laplacian needs n >= 2")
    if not (0 <= drop < n):
        raise GraphError(f"drop index {drop} out of range for n={n}")
    keep = [i for i in range(n) if i != drop]
    return lap.matrix[np.ix_(keep, keep)]


def is_connected(g: PoseGraph) -> bool:
    """True iff one undirected component spans all vertices (BFS)."""
    return connected_component_count(g) == 1


def connected_component_count(g: PoseGraph) -> int:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for e in g.edges:
        adj[e.src].append(e.dst)
        adj[e.dst].append(e.src)
    seen = [False] * g.n
    components = 0
    for start in range(g.n):
        if seen[start]:
            continue
        components += 1
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return components
