"""Grid searches (A*, BFS, DFS), heuristics, and path-to-action conversion.

All searches share the same accounting: an expansion is one node removed
from the frontier and moved to the closed set, the goal test happens at
expansion time, and step cost is uniform 1 per 4-connected move.

A* tie-breaking among equal f: prefer larger g, then most recently
inserted (LIFO) - depth preference keeps expansion deterministic and
"continues on the path" it is already following.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .grid import Cell, GridMap, neighbors


class StartOrGoalBlocked(ValueError):
    """Start or goal sits on an obstacle (only possible on programmatic grids)."""


class HeuristicKind(Enum):
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"
    HALF_SUM = "half"
    ZERO = "zero"


class Action(Enum):
    FORWARD = "FORWARD"
    BACK = "BACK"
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    STOP = "STOP"


class Heading(Enum):
    """Compass heading on the map; clockwise order N, E, S, W (row 0 at top)."""

    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3


# (d_row, d_col) per heading, indexed by Heading.value.
_HEADING_DELTAS = ((-1, 0), (0, 1), (1, 0), (0, -1))


@dataclass
class PlanResult:
    """Search outcome plus the statistics the benchmark measures.

    expansions records (cell, g, f) in expansion order; cost is -1 when no
    path was found.
    """

    found: bool
    path: list[Cell] = field(default_factory=list)
    cost: int = -1
    nodes_expanded: int = 0
    max_open_size: int = 0
    wall_time: float = 0.0
    expansions: list[tuple[Cell, float, float]] = field(default_factory=list)


def heuristic(kind: HeuristicKind, a: Cell, b: Cell) -> float:
    dx = abs(a.col - b.col)
    dy = abs(a.row - b.row)
    if kind is HeuristicKind.MANHATTAN:
        return float(dx + dy)
    if kind is HeuristicKind.EUCLIDEAN:
        return math.sqrt(dx * dx + dy * dy)
    if kind is HeuristicKind.HALF_SUM:
        return (dx + dy) / 2.0
    return 0.0


def _check_endpoints(grid: GridMap):
    if not grid.is_free(grid.start):
        raise StartOrGoalBlocked(f"start {grid.start} is occupied")
    if not grid.is_free(grid.goal):
        raise StartOrGoalBlocked(f"goal {grid.goal} is occupied")


def _trace_path(parent: dict[Cell, Cell | None], goal: Cell) -> list[Cell]:
    path = [goal]
    cur: Cell | None = parent[goal]
    while cur is not None:
        path.append(cur)
        cur = parent[cur]
    path.reverse()
    return path


def astar(grid: GridMap, kind: HeuristicKind = HeuristicKind.MANHATTAN) -> PlanResult:
    """A* with open/closed sets, min-f expansion, and open-node re-parenting.

    Re-parenting uses lazy reinsertion: a cheaper route pushes a fresh heap
    entry and stale entries are discarded when popped against the closed set,
    so no cell is ever expanded twice.
    """
    _check_endpoints(grid)
    t0 = time.perf_counter()

    start, goal = grid.start, grid.goal
    g_score: dict[Cell, int] = {start: 0}
    parent: dict[Cell, Cell | None] = {start: None}
    closed: set[Cell] = set()
    expansions: list[tuple[Cell, float, float]] = []

    h0 = heuristic(kind, start, goal)
    # Heap key: (f, -g, -insertion_seq) -> min f, then max g, then LIFO.
    heap: list[tuple[float, int, int, Cell]] = [(h0, 0, 0, start)]
    in_open = {start}
    push_seq = 1
    max_open = 1

    result = PlanResult(found=False)
    while heap:
        f, neg_g, _, cell = heapq.heappop(heap)
        if cell in closed:
            continue  # stale entry superseded by a cheaper route
        in_open.discard(cell)
        closed.add(cell)
        g =g_score[cell]
        expansions.append((cell, float(g), f))
        if cell == goal:
            path = _trace_path(parent, goal)
            result = PlanResult(found=True, path=path, cost=g)
            break
        for nbr in neighbors(grid, cell):
            if nbr in closed:
                continue
            tentative = g + 1
            if tentative < g_score.get(nbr, math.inf):
                g_score[nbr] = tentative
                parent[nbr] = cell
                heapq.heappush(
                    heap, (tentative + heuristic(kind, nbr, goal), -tentative, -push_seq, nbr)
                )
                push_seq += 1
                in_open.add(nbr)
        if len(in_open) > max_open:
            max_open = len(in_open)

    result.nodes_expanded = len(expansions)
    result.max_open_size = max_open
    result.expansions = expansions
    result.wall_time = time.perf_counter() - t0
    return result


def bfs(grid: GridMap) -> PlanResult:
    """Breadth-first search; FIFO frontier, minimum-cost path on unit grids."""
    _check_endpoints(grid)
    t0 = time.perf_counter()

    start, goal = grid.start, grid.goal
    parent: dict[Cell, Cell | None] = {start: None}
    depth: dict[Cell, int] = {start: 0}
    queue: deque[Cell] = deque([start])
    seen = {start}
    expansions: list[tuple[Cell, float, float]] = []
    max_open = 1

    result = PlanResult(found=False)
    while queue:
        cell = queue.popleft()
        g = depth[cell]
        expansions.append((cell, float(g), float(g)))
        if cell == goal:
            result = PlanResult(found=True, path=_trace_path(parent, goal), cost=g)
            break
        for nbr in neighbors(grid, cell):
            if nbr not in seen:
                seen.add(nbr)
                parent[nbr] = cell
                depth[nbr] = g + 1
                queue.append(nbr)
        if len(queue) > max_open:
            max_open = len(queue)

    result.nodes_expanded = len(expansions)
    result.max_open_size = max_open
    result.expansions = expansions
    result.wall_time = time.perf_counter() - t0
    return result


def dfs(grid: GridMap) -> PlanResult:
    """Depth-first search; LIFO frontier, returns some path, not necessarily optimal.

    Neighbors are pushed in reversed order so Up is explored first.  The
    visited check is delayed to pop time; duplicate stack entries are
    skipped without counting as expansions.
    """
    _check_endpoints(grid)
    t0 = time.perf_counter()

    start, goal = grid.start, grid.goal
    parent: dict[Cell, Cell | None] = {}
    depth: dict[Cell, int] = {}
    stack: list[tuple[Cell, Cell | None]] = [(start, None)]
    closed: set[Cell] = set()
    expansions: list[tuple[Cell, float, float]] = []
    max_open = 1

    result = PlanResult(found=False)
    while stack:
        cell, via = stack.pop()
        if cell in closed:
            continue
        closed.add(cell)
        parent[cell] = via
        g = 0 if via is None else depth[via] + 1
        depth[cell] = g
        expansions.append((cell, float(g), float(g)))
        if cell == goal:
            result = PlanResult(found=True, path=_trace_path(parent, goal), cost=g)
            break
        for nbr in reversed(neighbors(grid, cell)):
            if nbr not in closed:
                stack.append((nbr, cell))
        if len(stack) > max_open:
            max_open = len(stack)

    result.nodes_expanded = len(expansions)
    result.max_open_size = max_open
    result.expansions = expansions
    result.wall_time = time.perf_counter() - t0
    return result


def heading_between(a: Cell, b: Cell) -> Heading:
    """Heading that moves from a to an adjacent cell b."""
    delta = (b.row - a.row, b.col - a.col)
    for h in Heading:
        if _HEADING_DELTAS[h.value] == delta:
            return h
    raise ValueError(f"cells {a} and {b} are not 4-adjacent")


def turn_actions(current: Heading, desired: Heading) -> list[Action]:
    """In-place 90-degree turns aligning current with desired.

    A 180-degree reversal is two RIGHT turns: FORWARD stays the only
    translation in executed plans (BACK is teleop-only).
    """
    diff = (desired.value - current.value) % 4
    if diff == 0:
        return []
    if diff == 1:
        return [Action.RIGHT]
    if diff == 2:
        return [Action.RIGHT, Action.RIGHT]
    return [Action.LEFT]


def path_to_actions(path: list[Cell], initial_heading: Heading) -> list[Action]:
    """Turn/forward action sequence executing a cell path; always ends with STOP."""
    actions: list[Action] = []
    heading = initial_heading
    for a, b in zip(path, path[1:]):
        desired = heading_between(a, b)
        actions.extend(turn_actions(heading, desired))
        heading = desired
        actions.append(Action.FORWARD)
    actions.append(Action.STOP)
    return actions
