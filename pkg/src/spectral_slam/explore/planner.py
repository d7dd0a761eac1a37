"""Grid path planning on the belief map (Dijkstra, 8-connected)."""

from __future__ import annotations

import math

import numpy as np

from spectral_slam.explore.grid import FREE, OccupancyGrid
from spectral_slam.explore.kernels import dijkstra_field

_GOAL_NEIGHBORS = (
    (-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0),
    (-1, -1, math.sqrt(2)), (-1, 1, math.sqrt(2)),
    (1, -1, math.sqrt(2)), (1, 1, math.sqrt(2)),
)


def _backtrack(parent: np.ndarray, width: int, end: tuple[int, int]):
    path = [end]
    idx = parent[end]
    while idx >= 0:
        path.append((int(idx) // width, int(idx) % width))
        idx = parent[path[-1]]
    path.reverse()
    return path


def _path_to(dist, parent, width, goal, resolution):
    """Path and cost (meters) to ``goal``; the goal cell itself is admitted
    even when not traversable (frontier centroids may sit on unknown cells).
    Returns (None, inf) when unreachable."""
    gr, gc = goal
    if math.isfinite(dist[gr, gc]):
        return _backtrack(parent, width, goal), float(dist[gr, gc]) * resolution
    height, w = dist.shape
    best = None
    for dr, dc, cost in _GOAL_NEIGHBORS:
        nr, nc = gr + dr, gc + dc
        if 0 <= nr < height and 0 <= nc < w and math.isfinite(dist[nr, nc]):
            total = float(dist[nr, nc]) + cost
            if best is None or total < best[0]:
                best = (total, (nr, nc))
    if best is None:
        return None, math.inf
    path = _backtrack(parent, width, best[1])
    path.append(goal)
    return path, best[0] * resolution


def plan_to_goals(belief: OccupancyGrid, start: tuple[int, int], goals):
    """One Dijkstra field from ``start``, then per-goal path extraction.
    Returns a list of (path, cost_m) aligned with ``goals``; unreachable
    goals yield (None, inf)."""
    passable = (belief.cells == FREE).astype(np.uint8)
    dist, parent = dijkstra_field(passable, start[0], start[1])
    width = belief.width
    return [_path_to(dist, parent, width, g, belief.resolution) for g in goals]


def plan_path(belief: OccupancyGrid, start: tuple[int, int],
              goal: tuple[int, int]):
    """Minimum-cost 8-connected path over free cells (diagonal cost sqrt(2)),
    admitting the goal cell regardless of its state. Returns (path, cost_m);
    (None, inf) when unreachable."""
    return plan_to_goals(belief, start, [goal])[0]
