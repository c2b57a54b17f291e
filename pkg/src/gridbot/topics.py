"""Standard topics, payload schemas, and payload <-> domain conversions.

Payloads are plain JSON-compatible dicts so the same schema rides the
serial frames and the WebSocket gateway unchanged.
"""

from __future__ import annotations

from .bus import Bus, SchemaMismatch
from .grid import GLYPH_FREE, GLYPH_OBSTACLE, Cell, GridMap
from .kinematics import Pose, WheelSpec
from .planner import Action

ACTION_NAMES = {a.value for a in Action}


def _need(payload: dict, key: str, kinds: tuple[type, ...]):
    if key not in payload:
        raise SchemaMismatch(f"missing field {key!r}")
    value = payload[key]
    if isinstance(value, bool) and bool not in kinds:
        raise SchemaMismatch(f"field {key!r} has wrong type bool")
    if not isinstance(value, kinds):
        raise SchemaMismatch(f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _need_cell(payload: dict, key: str) -> tuple[int, int]:
    value = _need(payload, key, (list, tuple))
    if (
        len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaMismatch(f"field {key!r} must be [row, col] integers")
    return (value[0], value[1])


def validate_command(payload: dict):
    action = _need(payload, "action", (str,))
    if action not in ACTION_NAMES:
        raise SchemaMismatch(f"unknown action {action!r}")
    steps = _need(payload, "steps", (int,))
    if action == Action.STOP.value:
        if steps < 0:
            raise SchemaMismatch("steps must be >= 0 for STOP")
    elif steps < 1:
        raise SchemaMismatch(f"steps must be >= 1 for {action}")


def validate_ack(payload: dict):
    _need(payload, "pulse_error_l", (int,))
    _need(payload, "pulse_error_r", (int,))
    ticks = _need(payload, "ticks", (int,))
    if ticks < 0:
        raise SchemaMismatch("ticks must be >= 0")
    _need(payload, "ok", (bool,))


def validate_pose(payload: dict):
    _need(payload, "x_in", (int, float))
    _need(payload, "y_in", (int, float))
    _need(payload, "theta_rad", (int, float))
    _need_cell(payload, "cell")


def validate_map(payload: dict):
    rows = _need(payload, "grid", (list,))
    if not rows or not all(isinstance(r, str) for r in rows):
        raise SchemaMismatch("grid must be a non-empty list of row strings")
    width = len(rows[0])
    if width == 0:
        raise SchemaMismatch("grid rows must be non-empty")
    for r, row in enumerate(rows):
        if len(row) != width:
            raise SchemaMismatch(f"grid row {r} has length {len(row)}, expected {width}")
        bad = set(row) - {GLYPH_FREE, GLYPH_OBSTACLE}
        if bad:
            raise SchemaMismatch(f"grid row {r} has unknown glyphs {sorted(bad)}")
    start = _need_cell(payload, "start")
    goal = _need_cell(payload, "goal")
    for name, (r, c) in (("start", start), ("goal", goal)):
        if not (0 <= r < len(rows) and 0 <= c < width):
            raise SchemaMismatch(f"{name} {[r, c]} out of bounds")
        if rows[r][c] == GLYPH_OBSTACLE:
            raise SchemaMismatch(f"{name} {[r, c]} sits on an obstacle")


def validate_plan_ack(payload: dict):
    _need(payload, "seq_of_cmd", (int,))


def validate_plan_run(payload: dict):
    if "heuristic" in payload:
        kind = _need(payload, "heuristic", (str,))
        if kind not in ("manhattan", "euclidean", "half", "zero"):
            raise SchemaMismatch(f"unknown heuristic {kind!r}")


def validate_plan_result(payload: dict):
    _need(payload, "found", (bool,))
    _need(payload, "cost", (int,))
    path = _need(payload, "path", (list,))
    for i, cell in enumerate(path):
        if (
            not isinstance(cell, (list, tuple))
            or len(cell) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in cell)
        ):
            raise SchemaMismatch(f"path[{i}] must be [row, col] integers")


def validate_reset(payload: dict):
    _need(payload, "x_in", (int, float))
    _need(payload, "y_in", (int, float))
    _need(payload, "theta_rad", (int, float))


TOPIC_VALIDATORS = {
    "/map": validate_map,
    "/plan/actions": validate_command,
    "/plan/ack": validate_plan_ack,
    "/plan/run": validate_plan_run,
    "/plan/result": validate_plan_result,
    "/drive/cmd": validate_command,
    "/drive/ack": validate_ack,
    "/drive/reset": validate_reset,
    "/pose": validate_pose,
}

RETAINED_TOPICS = {"/map", "/pose", "/plan/result"}


def make_bus() -> Bus:
    """A bus with the standard topic set registered."""
    bus = Bus()
    for name, validator in TOPIC_VALIDATORS.items():
        bus.register_topic(name, validator, retain=name in RETAINED_TOPICS)
    return bus


def grid_to_payload(grid: GridMap) -> dict:
    rows = [
        "".join(GLYPH_OBSTACLE if grid.occupancy[r][c] else GLYPH_FREE for c in range(grid.cols))
        for r in range(grid.rows)
    ]
    return {
        "grid": rows,
        "start": [grid.start.row, grid.start.col],
        "goal": [grid.goal.row, grid.goal.col],
    }


def payload_to_grid(payload: dict) -> GridMap:
    validate_map(payload)
    rows = payload["grid"]
    occupancy = tuple(tuple(ch == GLYPH_OBSTACLE for ch in row) for row in rows)
    return GridMap(
        len(rows),
        len(rows[0]),
        occupancy,
        Cell(*payload["start"]),
        Cell(*payload["goal"]),
    )


def pose_to_payload(pose: Pose, spec: WheelSpec) -> dict:
    from .grid import world_to_cell

    cell = world_to_cell(pose.x, pose.y, spec.inches_per_rev)
    return {
        "x_in": pose.x,
        "y_in": pose.y,
        "theta_rad": pose.theta,
        "cell": [cell.row, cell.col],
    }
