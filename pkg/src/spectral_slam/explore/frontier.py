"""Frontier detection: free cells bordering unknown space, clustered."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from spectral_slam.explore.grid import FREE, UNKNOWN, OccupancyGrid

MIN_CLUSTER_CELLS = 5

_CLUSTER_STRUCTURE = np.ones((3, 3), dtype=bool)  # 8-connected clustering


@dataclass(frozen=True)
class Frontier:
    """A cluster of free cells 4-adjacent to unknown space."""

    centroid: tuple[float, float]  # (x, y) meters
    cells: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.cells)


def frontier_mask(belief: OccupancyGrid) -> np.ndarray:
    free = belief.cells == FREE
    unknown = belief.cells == UNKNOWN
    near_unknown = np.zeros_like(unknown)
    near_unknown[:-1, :] |= unknown[1:, :]
    near_unknown[1:, :] |= unknown[:-1, :]
    near_unknown[:, :-1] |= unknown[:, 1:]
    near_unknown[:, 1:] |= unknown[:, :-1]
    return free & near_unknown


def detect_frontiers(belief: OccupancyGrid,
                     min_cluster: int = MIN_CLUSTER_CELLS) -> list[Frontier]:
    """Maximal 8-connected clusters of frontier cells, clusters below
    ``min_cluster`` cells discarded; sorted by size descending, ties by
    lowest (y, x) centroid. Empty list means exploration is complete."""
    mask = frontier_mask(belief)
    labels, n_labels = ndimage.label(mask, structure=_CLUSTER_STRUCTURE)
    res = belief.resolution
    frontiers = []
    for lbl in range(1, n_labels + 1):
        rows, cols = np.nonzero(labels == lbl)
        if len(rows) < min_cluster:
            continue
        cx = (float(np.mean(cols)) + 0.5) * res
        cy = (float(np.mean(rows)) + 0.5) * res
        cells = tuple(zip(rows.tolist(), cols.tolist()))
        frontiers.append(Frontier((cx, cy), cells))
    frontiers.sort(key=lambda f: (-f.size, f.centroid[1], f.centroid[0]))
    return frontiers


def goal_cell(frontier: Frontier, resolution: float,
              avoid: tuple[int, int] | None = None) -> tuple[int, int]:
    """Member cell nearest the centroid (the centroid itself can fall on a
    non-free cell); ties broken lexicographically.

    ``avoid`` handles the degenerate case of a frontier that wraps around
    the robot so its centroid sits at the robot's own cell: then the goal
    becomes the member cell farthest from ``avoid``, forcing actual travel.
    """
    cx, cy = frontier.centroid
    best = None
    for r, c in frontier.cells:
        x, y = (c + 0.5) * resolution, (r + 0.5) * resolution
        key = ((x - cx) ** 2 + (y - cy) ** 2, r, c)
        if best is None or key < best:
            best = key
    if avoid is not None and (best[1], best[2]) == avoid:
        far = None
        for r, c in frontier.cells:
            key = (-((r - avoid[0]) ** 2 + (c - avoid[1]) ** 2), r, c)
            if far is None or key < far:
                far = key
        return far[1], far[2]
    return best[1], best[2]
