"""Occupancy-grid world model: map parsing, neighbor queries, coordinate transforms.

The world is a rows x cols boolean occupancy grid with one start and one
goal cell.  Cell indexing is row-major with row 0 at the top of the map
file; the map is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


class MalformedMap(ValueError):
    """Raised when map text violates the ASCII map format."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)


class Cell(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class GridMap:
    """Deterministic grid world: occupancy flags plus start and goal cells.

    occupancy[r][c] is True where the cell is an obstacle.  Start/goal
    occupancy is deliberately not enforced here so that searches can
    signal StartOrGoalBlocked on programmatically built grids; maps that
    come through parse_map can never violate it.
    """

    rows: int
    cols: int
    occupancy: tuple[tuple[bool, ...], ...]
    start: Cell
    goal: Cell

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.rows}x{self.cols}")
        if len(self.occupancy) != self.rows or any(len(r) != self.cols for r in self.occupancy):
            raise ValueError("occupancy shape does not match rows x cols")
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise ValueError(f"{name} {cell} out of bounds for {self.rows}x{self.cols} grid")

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c.row < self.rows and 0 <= c.col < self.cols

    def is_free(self, c: Cell) -> bool:
        return not self.occupancy[c.row][c.col]


# Fixed neighbor order: Up, Right, Down, Left.  A fixed order makes every
# search run bit-reproducible.
_NEIGHBOR_OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))

GLYPH_FREE = "."
GLYPH_OBSTACLE = "#"
GLYPH_START = "S"
GLYPH_GOAL = "G"


def parse_map(text: str) -> GridMap:
    """Parse the ASCII map format into a GridMap.

    Format: newline-separated rows of equal length; '.' free, '#' obstacle,
    'S' start (exactly one), 'G' goal (exactly one).  Trailing newline
    optional.  Solvability is not a parse concern.
    """
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedMap("empty map")

    width = len(lines[0])
    if width == 0:
        raise MalformedMap("empty first row", line=1)

    occupancy: list[tuple[bool, ...]] = []
    start: Cell | None = None
    goal: Cell | None = None
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MalformedMap(
                f"ragged row: expected {width} columns, got {len(line)}", line=r + 1
            )
        row_flags = []
        for c, glyph in enumerate(line):
            if glyph == GLYPH_OBSTACLE:
                row_flags.append(True)
                continue
            row_flags.append(False)
            if glyph == GLYPH_START:
                if start is not None:
                    raise MalformedMap("duplicate start 'S'", line=r + 1, col=c + 1)
                start = Cell(r, c)
            elif glyph == GLYPH_GOAL:
                if goal is not None:
                    raise MalformedMap("duplicate goal 'G'", line=r + 1, col=c + 1)
                goal = Cell(r, c)
            elif glyph != GLYPH_FREE:
                raise MalformedMap(f"unknown glyph {glyph!r}", line=r + 1, col=c + 1)
        occupancy.append(tuple(row_flags))

    if start is None:
        raise MalformedMap("missing start 'S'")
    if goal is None:
        raise MalformedMap("missing goal 'G'")
    return GridMap(len(lines), width, tuple(occupancy), start, goal)


def serialize_map(grid: GridMap) -> str:
    """Render a GridMap back to map text (inverse of parse_map)."""
    out = []
    for r in range(grid.rows):
        row = []
        for c in range(grid.cols):
            cell = Cell(r, c)
            if grid.occupancy[r][c]:
                row.append(GLYPH_OBSTACLE)
            elif cell == grid.start:
                row.append(GLYPH_START)
            elif cell == grid.goal:
                row.append(GLYPH_GOAL)
            else:
                row.append(GLYPH_FREE)
        out.append("".join(row))
    return "\n".join(out) + "\n"


def render_overlay(grid: GridMap, path: list[Cell]) -> str:
    """Map text with '*' on path cells; start/goal glyphs win over '*'."""
    lines = [list(row) for row in serialize_map(grid).splitlines()]
    for cell in path:
        if cell != grid.start and cell != grid.goal:
            lines[cell.row][cell.col] = "*"
    return "\n".join("".join(row) for row in lines) + "\n"


def neighbors(grid: GridMap, c: Cell) -> list[Cell]:
    """In-bounds, unoccupied 4-neighbors of c in fixed Up, Right, Down, Left order."""
    result = []
    for dr, dc in _NEIGHBOR_OFFSETS:
        n = Cell(c.row + dr, c.col + dc)
        if grid.in_bounds(n) and not grid.occupancy[n.row][n.col]:
            result.append(n)
    return result


def cell_to_world(c: Cell, step_len: float) -> tuple[float, float]:
    """Cell center in world inches: x along columns, y along rows (row 0 at top)."""
    if step_len <= 0:
        raise ValueError("step_len must be positive")
    return (c.col * step_len, c.row * step_len)


def world_to_cell(x: float, y: float, step_len: float) -> Cell:
    """Nearest cell center for a world point (inverse of cell_to_world)."""
    if step_len <= 0:
        raise ValueError("step_len must be positive")
    return Cell(round(y / step_len), round(x / step_len))
