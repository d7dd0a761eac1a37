"""Deterministic built-in worlds: an office-like 56 m x 45 m floor plan and
simple empty rooms. The office map is also bundled as package data
(worlds/office.txt), generated by this module."""

from __future__ import annotations

from importlib import resources

import numpy as np

from spectral_slam.explore.grid import FREE, OCCUPIED, OccupancyGrid, parse_world

_WALL = 2  # wall thickness, cells


def empty_room(width_m: float = 10.0, height_m: float = 10.0,
               resolution: float = 0.25) -> OccupancyGrid:
    w = int(round(width_m / resolution))
    h = int(round(height_m / resolution))
    cells = np.full((h, w), FREE, dtype=np.int8)
    cells[:_WALL, :] = OCCUPIED
    cells[-_WALL:, :] = OCCUPIED
    cells[:, :_WALL] = OCCUPIED
    cells[:, -_WALL:] = OCCUPIED
    return OccupancyGrid(cells, resolution)


def _vwall(cells, col, row_lo, row_hi, doors):
    cells[row_lo:row_hi, col:col + _WALL] = OCCUPIED
    for d in doors:
        cells[d:d + 8, col:col + _WALL] = FREE


def _hwall(cells, row, col_lo, col_hi, doors):
    cells[row:row + _WALL, col_lo:col_hi] = OCCUPIED
    for d in doors:
        cells[row:row + _WALL, d:d + 8] = FREE


def office_world(resolution: float = 0.25) -> OccupancyGrid:
    """Office-like floor plan, 56 m x 45 m: a ring of rooms around two
    corridor axes, with 2 m door gaps."""
    w, h = int(round(56.0 / resolution)), int(round(45.0 / resolution))
    cells = np.full((h, w), FREE, dtype=np.int8)
    cells[:_WALL, :] = OCCUPIED
    cells[-_WALL:, :] = OCCUPIED
    cells[:, :_WALL] = OCCUPIED
    cells[:, -_WALL:] = OCCUPIED

    # corridor walls: three vertical and two horizontal dividers with doors
    _vwall(cells, 56, 0, h, doors=(20, 86, 150))
    _vwall(cells, 112, 0, h, doors=(40, 110, 164))
    _vwall(cells, 168, 0, h, doors=(24, 90, 140))
    _hwall(cells, 60, 0, w, doors=(28, 80, 130, 188))
    _hwall(cells, 120, 0, w, doors=(40, 96, 150, 204))

    # room partitions inside the quadrants
    _hwall(cells, 30, 0, 56, doors=(10,))
    _hwall(cells, 30, 112, 168, doors=(130,))
    _hwall(cells, 90, 56, 112, doors=(70,))
    _hwall(cells, 90, 168, w, doors=(190,))
    _hwall(cells, 150, 0, 56, doors=(34,))
    _hwall(cells, 150, 112, 168, doors=(118,))
    _vwall(cells, 28, 120, 180, doors=(130, 158))
    _vwall(cells, 140, 0, 60, doors=(8, 40))
    _vwall(cells, 196, 120, 180, doors=(128,))
    _vwall(cells, 84, 120, 180, doors=(136,))
    return OccupancyGrid(cells, resolution)


def bundled_office() -> OccupancyGrid:
    """The office world as shipped in package data."""
    text = resources.files("spectral_slam").joinpath("worlds/office.txt").read_text()
    return parse_world(text)
