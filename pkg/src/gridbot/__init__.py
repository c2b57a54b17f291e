"""gridbot: grid pathfinding robot twin.

Planner (A*/BFS/DFS over occupancy grids), differential-drive simulator
with calibrated encoder noise, closed-loop step controller, three-station
pub/sub bus with a WebSocket gateway, and a benchmark/episode CLI.
"""

from .grid import Cell, GridMap, MalformedMap, neighbors, parse_map, serialize_map
from .kinematics import MotionCase, Pose, WheelSpec
from .planner import (
    Action,
    Heading,
    HeuristicKind,
    PlanResult,
    astar,
    bfs,
    dfs,
    heuristic,
    path_to_actions,
)
from .drive import DriveSim, MotorCommand, NoiseParams, WheelDirection
from .controller import ControllerParams, StepCommand, StepReport, run_step
from .bus import Bus, BusMessage, frame_decode, frame_encode
from .stations import EpisodeReport, ServeApp, run_episode

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Bus",
    "BusMessage",
    "Cell",
    "ControllerParams",
    "DriveSim",
    "EpisodeReport",
    "GridMap",
    "Heading",
    "HeuristicKind",
    "MalformedMap",
    "MotionCase",
    "MotorCommand",
    "NoiseParams",
    "PlanResult",
    "Pose",
    "ServeApp",
    "StepCommand",
    "StepReport",
    "WheelDirection",
    "WheelSpec",
    "astar",
    "bfs",
    "dfs",
    "frame_decode",
    "frame_encode",
    "heuristic",
    "neighbors",
    "parse_map",
    "path_to_actions",
    "run_episode",
    "run_step",
    "serialize_map",
]
