"""Hallucinated weighted pose-graphs for candidate paths.

A candidate's graph extends the live pose-graph with nodes sampled along
the planned path (one per meter of arc length plus one at the goal),
chained by odometry edges. Each hallucinated edge carries a predicted
information matrix derived from the last known edge info by three factors:
motion decay (uncertainty grows with every hallucinated step), exploration
gain (unknown area nearby), and loop-closure potential (occupied, i.e.
previously seen, area nearby); high loop-closure potential also attaches
an edge to the nearest existing node. Edge weights are the D-opt
(geometric-mean eigenvalue) of the predicted info, so only that scalar is
propagated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spectral_slam.core_graph import LaplacianMatrix, laplacian_from_edge_list
from spectral_slam.criteria import d_opt, spanning_tree_count
from spectral_slam.explore.grid import OCCUPIED, UNKNOWN, OccupancyGrid


@dataclass(frozen=True)
class HallucinationParams:
    """Heuristic constants; overridable via the explorer config file."""

    node_spacing: float = 1.0        # m between hallucinated nodes
    decay: float = 0.95              # per-step info decay
    k_unknown: float = 0.5           # exploration-gain coefficient
    k_occupied: float = 1.0          # loop-closure-potential coefficient
    neighborhood_radius: float = 3.0  # m disc for the area fractions
    loop_threshold: float = 0.05     # occupied fraction that triggers a loop edge
    loop_attach_radius: float = 2.0  # m search radius for the loop partner

    def to_dict(self) -> dict:
        return {
            "node_spacing": self.node_spacing,
            "decay": self.decay,
            "k_unknown": self.k_unknown,
            "k_occupied": self.k_occupied,
            "neighborhood_radius": self.neighborhood_radius,
            "loop_threshold": self.loop_threshold,
            "loop_attach_radius": self.loop_attach_radius,
        }


@dataclass
class GraphState:
    """Minimal view of the live pose-graph: node positions (estimated, m)
    and weighted edges."""

    positions: list[tuple[float, float]]
    edges: list[tuple[int, int]]
    weights: list[float]

    @property
    def n(self) -> int:
        return len(self.positions)


def neighborhood_fractions(belief: OccupancyGrid, x: float, y: float,
                           radius: float) -> tuple[float, float]:
    """(unknown fraction, occupied fraction) of the cells whose centers lie
    within ``radius`` meters of (x, y)."""
    res = belief.resolution
    r_cells = int(math.ceil(radius / res))
    row0, col0 = belief.cell_of(x, y)
    r_lo, r_hi = max(0, row0 - r_cells), min(belief.height, row0 + r_cells + 1)
    c_lo, c_hi = max(0, col0 - r_cells), min(belief.width, col0 + r_cells + 1)
    if r_lo >= r_hi or c_lo >= c_hi:
        return 0.0, 0.0
    rows = (np.arange(r_lo, r_hi) + 0.5) * res - y
    cols = (np.arange(c_lo, c_hi) + 0.5) * res - x
    inside = rows[:, None] ** 2 + cols[None, :] ** 2 <= radius ** 2
    total = int(np.count_nonzero(inside))
    if total == 0:
        return 0.0, 0.0
    patch = belief.cells[r_lo:r_hi, c_lo:c_hi]
    u = int(np.count_nonzero(inside & (patch == UNKNOWN))) / total
    o = int(np.count_nonzero(inside & (patch == OCCUPIED))) / total
    return u, o


def sample_along_path(path_xy: list[tuple[float, float]],
                      spacing: float) -> list[tuple[float, float]]:
    """Points every ``spacing`` meters of arc length, plus the endpoint."""
    if len(path_xy) < 2:
        return [path_xy[-1]] if path_xy else []
    samples = []
    target = spacing
    travelled = 0.0
    for (x0, y0), (x1, y1) in zip(path_xy, path_xy[1:]):
        seg = math.hypot(x1 - x0, y1 - y0)
        while seg > 0 and travelled + seg >= target:
            frac = (target - travelled) / seg
            samples.append((x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)))
            target += spacing
        travelled += seg
    end = path_xy[-1]
    if not samples or math.hypot(samples[-1][0] - end[0],
                                 samples[-1][1] - end[1]) > 1e-9:
        samples.append(end)
    return samples


def hallucinate_graph(state: GraphState, path_xy: list[tuple[float, float]],
                      belief: OccupancyGrid, last_phi: np.ndarray,
                      params: HallucinationParams = HallucinationParams(),
                      ) -> LaplacianMatrix:
    """Weighted Laplacian of the live graph extended along a candidate path.

    ``path_xy`` is the planned path in world meters starting at the robot
    (the live graph's last node); an empty/degenerate path still adds one
    goal node and edge.
    """
    base_w = d_opt(np.linalg.eigvalsh(np.asarray(last_phi, dtype=float)))
    nodes = sample_along_path(path_xy, params.node_spacing)
    if not nodes:
        nodes = [path_xy[-1]] if path_xy else [state.positions[-1]]

    n0 = state.n
    edges = list(state.edges)
    weights = list(state.weights)
    positions = np.asarray(state.positions, dtype=float)
    prev = n0 - 1  # hallucination chains off the robot's current node
    for s, (x, y) in enumerate(nodes, start=1):
        u, o = neighborhood_fractions(belief, x, y, params.neighborhood_radius)
        scale = (params.decay ** s) * (1.0 + params.k_unknown * u) \
            * (1.0 + params.k_occupied * o)
        w = base_w * scale
        new_idx = n0 + s - 1
        edges.append((prev, new_idx))
        weights.append(w)
        if o > params.loop_threshold and n0 > 0:
            d2 = np.sum((positions - (x, y)) ** 2, axis=1)
            nearest = int(np.argmin(d2))
            if d2[nearest] <= params.loop_attach_radius ** 2 and nearest != prev:
                edges.append((nearest, new_idx))
                weights.append(w)
        prev = new_idx
    return laplacian_from_edge_list(n0 + len(nodes), edges, weights,
                                    scheme="hallucinated")


def utility_dopt(lap: LaplacianMatrix) -> float:
    """Graph D-opt (n * weighted-tree-count)^(1/n) in log domain; -inf for a
    disconnected candidate."""
    n = lap.size
    log_t = spanning_tree_count(lap)
    if log_t == -math.inf:
        return -math.inf
    return math.exp((math.log(n) + log_t) / n)
