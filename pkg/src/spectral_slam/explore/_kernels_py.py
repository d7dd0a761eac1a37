"""Pure-Python grid kernels: laser ray casting and Dijkstra distance fields.

Fallback for the compiled extension; must produce bit-identical outputs
(same stepping arithmetic, same neighbor order, same heap tie-breaking on
(distance, flat index)).
"""

from __future__ import annotations

import heapq
import math

import numpy as np

_UNKNOWN = -1
_FREE = 0
_OCCUPIED = 1

SQRT2 = math.sqrt(2.0)

# neighbor order shared with the compiled kernel: orthogonal first, then
# diagonal, each in (-row, +row, -col, +col) order
_NEIGHBORS = (
    (-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0),
    (-1, -1, SQRT2), (-1, 1, SQRT2), (1, -1, SQRT2), (1, 1, SQRT2),
)


def cast_rays(world, belief, x, y, theta, resolution, max_range, n_beams, fov):
    """Cast ``n_beams`` rays across a ``fov`` arc centered on ``theta`` from
    world point (x, y), updating ``belief`` in place: traversed cells become
    free, the terminal hit occupied. Stepping is half-resolution."""
    height, width = world.shape
    step = 0.5 * resolution
    n_steps = int(max_range / step)
    row0 = int(math.floor(y / resolution))
    col0 = int(math.floor(x / resolution))
    if 0 <= row0 < height and 0 <= col0 < width and world[row0, col0] != _OCCUPIED:
        belief[row0, col0] = _FREE
    for b in range(n_beams):
        if n_beams > 1:
            ang = theta - 0.5 * fov + b * fov / (n_beams - 1)
        else:
            ang = theta
        dx = math.cos(ang)
        dy = math.sin(ang)
        for s in range(1, n_steps + 1):
            dist = s * step
            row = int(math.floor((y + dy * dist) / resolution))
            col = int(math.floor((x + dx * dist) / resolution))
            if row < 0 or row >= height or col < 0 or col >= width:
                break
            if world[row, col] == _OCCUPIED:
                belief[row, col] = _OCCUPIED
                break
            belief[row, col] = _FREE


def dijkstra_field(passable, start_row, start_col):
    """Single-source shortest paths over an 8-connected grid (diagonal cost
    sqrt(2)); only cells with ``passable != 0`` are traversable. Returns
    (dist, parent): dist is float64 (inf where unreachable), parent holds
    the predecessor's flat index (-1 at the source / unreachable cells)."""
    height, width = passable.shape
    dist = np.full((height, width), np.inf)
    parent = np.full((height, width), -1, dtype=np.int64)
    if not passable[start_row, start_col]:
        return dist, parent
    dist[start_row, start_col] = 0.0
    heap = [(0.0, start_row * width + start_col)]
    while heap:
        d, idx = heapq.heappop(heap)
        row, col = divmod(idx, width)
        if d > dist[row, col]:
            continue
        for dr, dc, cost in _NEIGHBORS:
            nr, nc = row + dr, col + dc
            if nr < 0 or nr >= height or nc < 0 or nc >= width:
                continue
            if not passable[nr, nc]:
                continue
            nd = d + cost
            if nd < dist[nr, nc]:
                dist[nr, nc] = nd
                parent[nr, nc] = idx
                heapq.heappush(heap, (nd, nr * width + nc))
    return dist, parent
