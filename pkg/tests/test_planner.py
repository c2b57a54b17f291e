import math

import pytest

from gridbot.bench import random_solvable_grid
from gridbot.grid import Cell, GridMap, parse_map
from gridbot.planner import (
    Action,
    Heading,
    HeuristicKind,
    StartOrGoalBlocked,
    astar,
    bfs,
    dfs,
    heading_between,
    heuristic,
    path_to_actions,
    turn_actions,
)


def brute_force_shortest(grid: GridMap) -> int:
    """Independent oracle: exhaustive DFS over simple paths (small grids only)."""
    best = math.inf

    def walk(cell, seen, depth):
        nonlocal best
        if depth >= best:
            return
        if cell == grid.goal:
            best = depth
            return
        for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1)):
            n = Cell(cell.row + dr, cell.col + dc)
            if grid.in_bounds(n) and grid.is_free(n) and n not in seen:
                walk(n, seen | {n}, depth + 1)

    walk(grid.start, {grid.start}, 0)
    return -1 if best is math.inf else int(best)


class TestHeuristics:
    def test_manhattan(self):
        assert heuristic(HeuristicKind.MANHATTAN, Cell(0, 0), Cell(4, 3)) == 7

    def test_euclidean_3_4_5(self):
        assert heuristic(HeuristicKind.EUCLIDEAN, Cell(0, 0), Cell(4, 3)) == 5.0

    def test_half_sum(self):
        assert heuristic(HeuristicKind.HALF_SUM, Cell(0, 0), Cell(4, 3)) == 3.5

    def test_zero(self):
        assert heuristic(HeuristicKind.ZERO, Cell(0, 0), Cell(4, 3)) == 0.0

    def test_symmetry_and_nonnegative(self):
        for kind in HeuristicKind:
            for a, b in ((Cell(1, 2), Cell(5, 0)), (Cell(0, 0), Cell(0, 0))):
                assert heuristic(kind, a, b) == heuristic(kind, b, a) >= 0


class TestAstar:
    def test_3x3_empty(self, empty3):
        # Oracle: brute-force shortest = 4 on an empty 3x3 corner-to-corner.
        assert brute_force_shortest(empty3) == 4
        r = astar(empty3, HeuristicKind.MANHATTAN)
        assert r.found
        assert r.cost == 4
        assert len(r.path) == 5
        assert r.path[0] == empty3.start and r.path[-1] == empty3.goal

    def test_1x1_start_equals_goal(self):
        g = GridMap(1, 1, ((False,),), Cell(0, 0), Cell(0, 0))
        r = astar(g)
        assert r.found
        assert r.cost == 0
        assert r.path == [Cell(0, 0)]
        assert r.nodes_expanded == 1

    def test_full_wall_unreachable(self):
        g = parse_map("S#.\n.#.\n.#G")
        assert brute_force_shortest(g) == -1
        r = astar(g)
        assert not r.found
        assert r.path == []
        assert r.cost == -1

    def test_blocked_start_programmatic(self):
        g = GridMap(2, 2, ((True, False), (False, False)), Cell(0, 0), Cell(1, 1))
        with pytest.raises(StartOrGoalBlocked):
            astar(g)

    def test_blocked_goal_programmatic(self):
        g = GridMap(2, 2, ((False, False), (False, True)), Cell(0, 0), Cell(1, 1))
        with pytest.raises(StartOrGoalBlocked):
            astar(g)

    def test_path_is_valid_cellpath(self, empty5):
        r = astar(empty5)
        for a, b in zip(r.path, r.path[1:]):
            assert abs(a.row - b.row) + abs(a.col - b.col) == 1
        assert all(empty5.is_free(c) for c in r.path)

    def test_cost_equals_path_length_minus_one(self, empty5):
        r = astar(empty5)
        assert r.cost == len(r.path) - 1

    def test_deterministic_across_runs(self, empty5):
        a = astar(empty5, HeuristicKind.EUCLIDEAN)
        b = astar(empty5, HeuristicKind.EUCLIDEAN)
        assert a.path == b.path
        assert [e[0] for e in a.expansions] == [e[0] for e in b.expansions]


class TestBfsDfs:
    def test_bfs_3x3_cost(self, empty3):
        assert bfs(empty3).cost == brute_force_shortest(empty3) == 4

    def test_dfs_finds_some_path(self, empty3):
        r = dfs(empty3)
        assert r.found
        assert r.cost >= 4  # bounded below by the optimum

    def test_bfs_expands_at_least_astar(self, empty5):
        assert bfs(empty5).nodes_expanded >= astar(empty5, HeuristicKind.MANHATTAN).nodes_expanded

    def test_dfs_path_valid(self):
        g = random_solvable_grid(8, 8, 0.25, 3)
        r = dfs(g)
        assert r.found
        for a, b in zip(r.path, r.path[1:]):
            assert abs(a.row - b.row) + abs(a.col - b.col) == 1
        assert r.path[0] == g.start and r.path[-1] == g.goal
        assert r.cost == len(r.path) - 1

    def test_blocked_endpoints(self):
        g = GridMap(2, 2, ((True, False), (False, False)), Cell(0, 0), Cell(1, 1))
        with pytest.raises(StartOrGoalBlocked):
            bfs(g)
        with pytest.raises(StartOrGoalBlocked):
            dfs(g)


class TestSearchInvariants:
    def test_optimality_oracle_random_grids(self):
        # BFS is the brute-force optimality oracle for every heuristic.
        for size in (5, 9, 14, 21, 30):
            for density in (0.0, 0.15, 0.3):
                for seed in range(3):
                    g = random_solvable_grid(size, size, density, seed)
                    want = bfs(g).cost
                    for kind in HeuristicKind:
                        assert astar(g, kind).cost == want, (size, density, seed, kind)

    def test_no_cell_expanded_twice(self):
        for seed in range(10):
            g = random_solvable_grid(12, 12, 0.25, seed)
            for result in (astar(g), bfs(g), dfs(g), astar(g, HeuristicKind.ZERO)):
                cells = [e[0] for e in result.expansions]
                assert len(cells) == len(set(cells))

    def test_f_monotone_under_manhattan(self):
        # Manhattan is consistent on 4-connected unit grids.
        for seed in range(10):
            g = random_solvable_grid(15, 15, 0.2, seed)
            r = astar(g, HeuristicKind.MANHATTAN)
            fs = [e[2] for e in r.expansions]
            assert all(a <= b + 1e-12 for a, b in zip(fs, fs[1:]))

    def test_manhattan_expands_no_more_than_zero(self):
        # Identical tie-breaking in both searches.
        for size in (6, 10, 16):
            for seed in range(6):
                g = random_solvable_grid(size, size, 0.2, seed)
                assert (
                    astar(g, HeuristicKind.MANHATTAN).nodes_expanded
                    <= astar(g, HeuristicKind.ZERO).nodes_expanded
                )

    def test_max_open_size_positive_and_bounded(self, empty5):
        for result in (astar(empty5), bfs(empty5)):
            assert 1 <= result.max_open_size <= empty5.rows * empty5.cols


# The 4x4 heading-transition table, enumerated by hand: headings in
# clockwise order N, E, S, W; diff 1 = RIGHT, 2 = RIGHT RIGHT, 3 = LEFT.
TURN_TABLE = {
    (Heading.NORTH, Heading.NORTH): [],
    (Heading.NORTH, Heading.EAST): [Action.RIGHT],
    (Heading.NORTH, Heading.SOUTH): [Action.RIGHT, Action.RIGHT],
    (Heading.NORTH, Heading.WEST): [Action.LEFT],
    (Heading.EAST, Heading.EAST): [],
    (Heading.EAST, Heading.SOUTH): [Action.RIGHT],
    (Heading.EAST, Heading.WEST): [Action.RIGHT, Action.RIGHT],
    (Heading.EAST, Heading.NORTH): [Action.LEFT],
    (Heading.SOUTH, Heading.SOUTH): [],
    (Heading.SOUTH, Heading.WEST): [Action.RIGHT],
    (Heading.SOUTH, Heading.NORTH): [Action.RIGHT, Action.RIGHT],
    (Heading.SOUTH, Heading.EAST): [Action.LEFT],
    (Heading.WEST, Heading.WEST): [],
    (Heading.WEST, Heading.NORTH): [Action.RIGHT],
    (Heading.WEST, Heading.EAST): [Action.RIGHT, Action.RIGHT],
    (Heading.WEST, Heading.SOUTH): [Action.LEFT],
}


class TestPathToActions:
    def test_all_16_heading_transitions(self):
        for (cur, want), actions in TURN_TABLE.items():
            assert turn_actions(cur, want) == actions, (cur, want)

    def test_already_aligned(self):
        acts = path_to_actions([Cell(0, 0), Cell(0, 1)], Heading.EAST)
        assert acts == [Action.FORWARD, Action.STOP]

    def test_east_to_south_is_right_turn(self):
        # Top-origin rows: moving to a larger row from heading East turns right.
        acts = path_to_actions([Cell(0, 0), Cell(1, 0)], Heading.EAST)
        assert acts == [Action.RIGHT, Action.FORWARD, Action.STOP]

    def test_single_cell_path(self):
        assert path_to_actions([Cell(0, 0)], Heading.NORTH) == [Action.STOP]

    def test_reversal_uses_two_rights(self):
        acts = path_to_actions([Cell(0, 1), Cell(0, 0)], Heading.EAST)
        assert acts == [Action.RIGHT, Action.RIGHT, Action.FORWARD, Action.STOP]

    def test_heading_between_rejects_non_adjacent(self):
        with pytest.raises(ValueError):
            heading_between(Cell(0, 0), Cell(2, 0))

    def test_forward_count_matches_path_length(self, empty5):
        path = astar(empty5).path
        acts = path_to_actions(path, Heading.EAST)
        assert acts.count(Action.FORWARD) == len(path) - 1
        assert acts[-1] == Action.STOP
        assert Action.BACK not in acts
