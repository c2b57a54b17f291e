"""Search-algorithm benchmark over random solvable grids, with CSV output.

Reproduces the DFS / BFS / A* comparison: grids from 5x5 up to 30x30,
obstacles drawn cell-i.i.d. at a given density, start fixed top-left and
goal bottom-right, re-drawn (bounded) until BFS finds a path.  Fully
deterministic given the seed list.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass

from .grid import Cell, GridMap
from .planner import HeuristicKind, PlanResult, astar, bfs, dfs

REDRAW_BOUND = 1000

# Fixed output order per (size, seed); also the CSV row order.
ALGORITHMS = ("dfs", "bfs", "astar-manhattan", "astar-euclidean", "astar-half")

CSV_HEADER = (
    "algorithm,grid_rows,grid_cols,density,seed,found,"
    "path_cost,nodes_expanded,max_open_size,wall_time_us"
)


class Unsolvable(RuntimeError):
    """No solvable grid drawn within the re-draw bound."""

    def __init__(self, rows: int, cols: int, density: float, seed: int):
        self.rows, self.cols, self.density, self.seed = rows, cols, density, seed
        super().__init__(
            f"no solvable {rows}x{cols} grid at density {density} "
            f"for seed {seed} within {REDRAW_BOUND} draws"
        )


@dataclass
class BenchRow:
    algorithm: str
    grid_rows: int
    grid_cols: int
    density: float
    seed: int
    found: bool
    path_cost: int
    nodes_expanded: int
    max_open_size: int
    wall_time_us: int

    def as_csv(self, include_timing: bool = True) -> list:
        return [
            self.algorithm,
            self.grid_rows,
            self.grid_cols,
            self.density,
            self.seed,
            str(self.found).lower(),
            self.path_cost,
            self.nodes_expanded,
            self.max_open_size,
            self.wall_time_us if include_timing else 0,
        ]


def random_grid(rows: int, cols: int, density: float, rng: random.Random) -> GridMap:
    """One i.i.d. obstacle draw; start top-left, goal bottom-right, both free."""
    start = Cell(0, 0)
    goal = Cell(rows - 1, cols - 1)
    occupancy = tuple(
        tuple(
            (r, c) != start and (r, c) != goal and rng.random() < density
            for c in range(cols)
        )
        for r in range(rows)
    )
    return GridMap(rows, cols, occupancy, start, goal)


def random_solvable_grid(rows: int, cols: int, density: float, seed: int) -> GridMap:
    """Re-draw until BFS finds a path; deterministic for a given seed."""
    if not 0 <= density < 1:
        raise ValueError(f"density must be in [0, 1), got {density}")
    # String seeding hashes via SHA-512 internally, so draws are stable
    # across processes and unaffected by PYTHONHASHSEED.
    rng = random.Random(f"{rows}x{cols}|{density!r}|{seed}")
    for _ in range(REDRAW_BOUND):
        grid = random_grid(rows, cols, density, rng)
        if bfs(grid).found:
            return grid
    raise Unsolvable(rows, cols, density, seed)


def run_algorithm(name: str, grid: GridMap) -> PlanResult:
    if name == "dfs":
        return dfs(grid)
    if name == "bfs":
        return bfs(grid)
    if name.startswith("astar-"):
        kind = {
            "astar-manhattan": HeuristicKind.MANHATTAN,
            "astar-euclidean": HeuristicKind.EUCLIDEAN,
            "astar-half": HeuristicKind.HALF_SUM,
            "astar-zero": HeuristicKind.ZERO,
        }[name]
        return astar(grid, kind)
    raise ValueError(f"unknown algorithm {name!r}")


def benchmark(
    sizes: list[tuple[int, int]],
    density: float,
    seeds: list[int],
    algorithms: tuple[str, ...] = ALGORITHMS,
) -> list[BenchRow]:
    """Run every algorithm on every (size, seed) grid; rows ordered by (size, seed, algorithm)."""
    rows: list[BenchRow] = []
    for gr, gc in sizes:
        for seed in seeds:
            grid = random_solvable_grid(gr, gc, density, seed)
            for name in algorithms:
                res = run_algorithm(name, grid)
                rows.append(
                    BenchRow(
                        algorithm=name,
                        grid_rows=gr,
                        grid_cols=gc,
                        density=density,
                        seed=seed,
                        found=res.found,
                        path_cost=res.cost,
                        nodes_expanded=res.nodes_expanded,
                        max_open_size=res.max_open_size,
                        wall_time_us=int(res.wall_time * 1e6),
                    )
                )
    return rows


def write_csv(rows: list[BenchRow], path: str, include_timing: bool = True):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER.split(","))
        for row in rows:
            writer.writerow(row.as_csv(include_timing))


def mean_expansions(rows: list[BenchRow]) -> dict[tuple[int, int, str], float]:
    """Mean nodes_expanded keyed by (grid_rows, grid_cols, algorithm)."""
    sums: dict[tuple[int, int, str], list[int]] = {}
    for row in rows:
        sums.setdefault((row.grid_rows, row.grid_cols, row.algorithm), []).append(
            row.nodes_expanded
        )
    return {key: sum(v) / len(v) for key, v in sums.items()}


def summary_table(rows: list[BenchRow]) -> str:
    """Human-readable mean nodes_expanded per algorithm per size."""
    means = mean_expansions(rows)
    sizes = sorted({(r.grid_rows, r.grid_cols) for r in rows})
    algos = [a for a in ALGORITHMS if any(r.algorithm == a for r in rows)]
    width = max(len(a) for a in algos) + 2
    lines = ["mean nodes expanded", "size".ljust(10) + "".join(a.rjust(width) for a in algos)]
    for size in sizes:
        label = f"{size[0]}x{size[1]}".ljust(10)
        cells = "".join(f"{means[(size[0], size[1], a)]:.1f}".rjust(width) for a in algos)
        lines.append(label + cells)
    return "\n".join(lines)
