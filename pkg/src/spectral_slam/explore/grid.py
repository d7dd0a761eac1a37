"""Ternary occupancy grids and the plain-text world-map format.

World files: a header line "width height resolution" followed by ``height``
rows of ``width`` characters, '#' occupied and '.' free (row 0 first; cell
(row, col) covers world coordinates [col*res, (col+1)*res) x
[row*res, (row+1)*res)). Belief grids additionally use '?' for unknown
when serialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNKNOWN = -1
FREE = 0
OCCUPIED = 1

_CHAR_TO_CELL = {"#": OCCUPIED, ".": FREE, "?": UNKNOWN}
_CELL_TO_CHAR = {OCCUPIED: "#", FREE: ".", UNKNOWN: "?"}


class WorldFormatError(ValueError):
    pass


@dataclass
class OccupancyGrid:
    """Grid of {unknown, free, occupied} cells; ``cells`` is int8 with shape
    (height, width)."""

    cells: np.ndarray
    resolution: float

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.int8)
        if self.cells.ndim != 2:
            raise WorldFormatError("grid cells must be 2-D")
        if self.resolution <= 0:
            raise WorldFormatError("resolution must be positive")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.cells.copy(), self.resolution)

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) containing world point (x, y) in meters."""
        return int(np.floor(y / self.resolution)), int(np.floor(x / self.resolution))

    def center_of(self, row: int, col: int) -> tuple[float, float]:
        """World (x, y) of a cell center."""
        return (col + 0.5) * self.resolution, (row + 0.5) * self.resolution

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width


def unknown_grid(like: OccupancyGrid) -> OccupancyGrid:
    """All-unknown belief grid matching a world's shape and resolution."""
    return OccupancyGrid(np.full_like(like.cells, UNKNOWN), like.resolution)


def parse_world(text: str, allow_unknown: bool = False) -> OccupancyGrid:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise WorldFormatError("empty world file")
    header = lines[0].split()
    if len(header) != 3:
        raise WorldFormatError("header must be 'width height resolution'")
    try:
        width, height = int(header[0]), int(header[1])
        resolution = float(header[2])
    except ValueError as exc:
        raise WorldFormatError(f"malformed header: {exc}") from None
    rows = lines[1:]
    if len(rows) != height:
        raise WorldFormatError(f"expected {height} rows, got {len(rows)}")
    cells = np.empty((height, width), dtype=np.int8)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise WorldFormatError(f"row {r} has {len(row)} chars, expected {width}")
        for c, ch in enumerate(row):
            if ch not in _CHAR_TO_CELL:
                raise WorldFormatError(f"unknown cell char {ch!r} at ({r},{c})")
            cell = _CHAR_TO_CELL[ch]
            if cell == UNKNOWN and not allow_unknown:
                raise WorldFormatError("world maps may not contain unknown cells")
            cells[r, c] = cell
    return OccupancyGrid(cells, resolution)


def serialize_world(grid: OccupancyGrid) -> str:
    lines = [f"{grid.width} {grid.height} {grid.resolution:g}"]
    for r in range(grid.height):
        lines.append("".join(_CELL_TO_CHAR[int(v)] for v in grid.cells[r]))
    return "\n".join(lines) + "\n"


def load_world(path) -> OccupancyGrid:
    with open(path) as fh:
        return parse_world(fh.read())
