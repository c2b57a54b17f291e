"""Matplotlib figure rendering for benchmark reports, plans, and episode traces.

Figures are written to files next to the delimited outputs; nothing here
is interactive (Agg backend).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import ALGORITHMS, BenchRow
from .grid import GridMap

_ALGO_STYLE = {
    "dfs": ("tab:red", "s"),
    "bfs": ("tab:orange", "^"),
    "astar-manhattan": ("tab:blue", "o"),
    "astar-euclidean": ("tab:green", "D"),
    "astar-half": ("tab:purple", "v"),
}


def _means(rows: list[BenchRow], attr: str) -> dict[tuple[str, int], float]:
    acc: dict[tuple[str, int], list[float]] = {}
    for r in rows:
        acc.setdefault((r.algorithm, r.grid_rows), []).append(getattr(r, attr))
    return {k: sum(v) / len(v) for k, v in acc.items()}


def render_bench_figure(rows: list[BenchRow], out_path: str):
    """Two-panel comparison: mean nodes expanded and mean wall time vs grid size."""
    sizes = sorted({r.grid_rows for r in rows})
    algos = [a for a in ALGORITHMS if any(r.algorithm == a for r in rows)]
    exp = _means(rows, "nodes_expanded")
    tim = _means(rows, "wall_time_us")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for algo in algos:
        color, marker = _ALGO_STYLE.get(algo, ("gray", "x"))
        ax1.plot(
            sizes, [exp[(algo, s)] for s in sizes],
            color=color, marker=marker, label=algo, linewidth=1.5,
        )
        ax2.plot(
            sizes, [tim[(algo, s)] for s in sizes],
            color=color, marker=marker, label=algo, linewidth=1.5,
        )
    ax1.set_xlabel("grid size (N x N)")
    ax1.set_ylabel("mean nodes expanded")
    ax2.set_xlabel("grid size (N x N)")
    ax2.set_ylabel("mean wall time (us)")
    ax1.legend(fontsize=8)
    for ax in (ax1, ax2):
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
        ax.grid(True, alpha=0.3)
    fig.suptitle("search comparison on random solvable grids")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def _draw_grid(ax, grid: GridMap):
    occ = [[1 if grid.occupancy[r][c] else 0 for c in range(grid.cols)] for r in range(grid.rows)]
    ax.imshow(occ, cmap="gray_r", origin="upper", interpolation="none")
    ax.plot(grid.start.col, grid.start.row, "g^", markersize=10, label="start")
    ax.plot(grid.goal.col, grid.goal.row, "r*", markersize=13, label="goal")
    ax.set_xticks(range(grid.cols))
    ax.set_yticks(range(grid.rows))
    ax.tick_params(labelsize=6)
    ax.grid(True, alpha=0.2)


def render_plan_figure(grid: GridMap, path, out_path: str):
    """Occupancy grid with the planned path overlaid."""
    fig, ax = plt.subplots(figsize=(5, 5))
    _draw_grid(ax, grid)
    if path:
        ax.plot([c.col for c in path], [c.row for c in path], "b-o", markersize=3, linewidth=1.2)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_episode_figure(grid: GridMap, report, step_len: float, out_path: str):
    """Planned path plus the continuous pose trajectory from the trace."""
    fig, ax = plt.subplots(figsize=(5, 5))
    _draw_grid(ax, grid)
    if report.planned_path:
        ax.plot(
            [c for _, c in report.planned_path],
            [r for r, _ in report.planned_path],
            "b--", linewidth=1.0, label="planned",
        )
    xs, ys = [], []
    for m in report.messages:
        if m["topic"] == "/pose":
            xs.append(m["payload"]["x_in"] / step_len)
            ys.append(m["payload"]["y_in"] / step_len)
    if xs:
        ax.plot(xs, ys, "m-", linewidth=1.5, label="executed")
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
