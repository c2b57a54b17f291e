"""Experiment runner and operator entry point.

Verbs: plan (path + action list + overlay), bench (search comparison CSV +
figure), simulate (full episode through the station bus), serve (stations +
WebSocket gateway for interactive clients).

Exit codes: 0 success, 1 input error, 2 no path, 3 episode failure.
A --config file holds flat key=value pairs mirroring the long flags;
explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import Unsolvable, benchmark, summary_table, write_csv
from .drive import NoiseParams
from .grid import MalformedMap, parse_map, render_overlay
from .planner import HeuristicKind, astar, path_to_actions, Heading
from .stations import AckTimeout, ServeApp, run_episode

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_PATH = 2
EXIT_EPISODE = 3

DEFAULT_SIZES = "5..30:5"
DEFAULT_SEEDS = "42..61"  # 20 seeds; documented benchmark default


def parse_seed_spec(spec: str) -> list[int]:
    """'7' | '1..100' | '3,5,9' -> list of ints."""
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    if "," in spec:
        return [int(s) for s in spec.split(",") if s.strip()]
    return [int(spec)]


def parse_size_spec(spec: str) -> list[tuple[int, int]]:
    """'5..30:5' | '5,10,15' | '8' -> square grid dimensions."""
    spec = spec.strip()
    if ".." in spec:
        head, _, step = spec.partition(":")
        lo, hi = head.split("..", 1)
        step_n = int(step) if step else 1
        return [(n, n) for n in range(int(lo), int(hi) + 1, step_n)]
    return [(int(s), int(s)) for s in spec.split(",") if s.strip()]


def parse_bind(spec: str) -> tuple[str, int]:
    host, _, port = spec.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bind address must be host:port, got {spec!r}")
    return host, int(port)


def load_config(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' comments; keys mirror the long flag names."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _load_map(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        print(f"error: cannot read map {path}: {e}", file=sys.stderr)
        return None
    try:
        return parse_map(text)
    except MalformedMap as e:
        print(f"error: malformed map {path}: {e}", file=sys.stderr)
        return None


def _noise_from_args(args) -> NoiseParams:
    return NoiseParams(
        slip_sd=args.slip_sd,
        overshoot_lo=args.overshoot_lo,
        overshoot_hi=args.overshoot_hi,
        enabled=args.noise == "on",
    )


def _wheel_spec_from_args(args):
    from .kinematics import WheelSpec

    return WheelSpec(
        wheel_base=args.wheel_base,
        inches_per_rev=args.inches_per_rev,
        pulses_per_rev=args.pulses_per_rev,
    )


def cmd_plan(args) -> int:
    grid = _load_map(args.map)
    if grid is None:
        return EXIT_INPUT
    result = astar(grid, HeuristicKind(args.heuristic))
    if not result.found:
        print("no path")
        print(f"nodes expanded: {result.nodes_expanded}")
        return EXIT_NO_PATH
    actions = path_to_actions(result.path, Heading.EAST)
    print(f"path cost: {result.cost}")
    print(f"nodes expanded: {result.nodes_expanded}")
    print(f"max open size: {result.max_open_size}")
    print("actions: " + " ".join(a.value for a in actions))
    overlay = render_overlay(grid, result.path)
    print(overlay, end="")
    if args.out:
        Path(args.out).write_text(overlay)
    if args.fig:
        from .report import render_plan_figure

        render_plan_figure(grid, result.path, args.fig)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = parse_size_spec(args.sizes)
        seeds = parse_seed_spec(args.seeds)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        rows = benchmark(sizes, args.density, seeds)
    except Unsolvable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    write_csv(rows, args.out, include_timing=not args.no_timing)
    print(summary_table(rows))
    print(f"csv: {args.out}")
    if not args.no_fig:
        fig_path = args.fig or str(Path(args.out).with_suffix(".png"))
        from .report import render_bench_figure

        render_bench_figure(rows, fig_path)
        print(f"figure: {fig_path}")
    return EXIT_OK


def _run_one_episode(grid, args, seed: int):
    return run_episode(
        grid,
        heuristic=HeuristicKind(args.heuristic),
        noise=_noise_from_args(args),
        seed=seed,
        transport=args.transport,
        pacing_bps=args.pacing_bps,
        ack_timeout=args.ack_timeout,
        spec=_wheel_spec_from_args(args),
        max_speed=args.max_speed,
    )


def cmd_simulate(args) -> int:
    grid = _load_map(args.map)
    if grid is None:
        return EXIT_INPUT
    seeds = parse_seed_spec(args.seeds)

    if len(seeds) == 1:
        try:
            report = _run_one_episode(grid, args, seeds[0])
        except AckTimeout as e:
            report = e.report
            if args.out:
                Path(args.out).write_text(
                    json.dumps(report.to_json(not args.no_timing), indent=2) + "\n"
                )
            print("episode failed: ack timeout")
            return EXIT_EPISODE
        if report.error == "no_path":
            print("no path")
            return EXIT_NO_PATH
        print(f"success: {report.success}")
        print(f"final cell: {report.final_cell}  goal: {report.goal}")
        print(f"steps: {len(report.actions)}  messages: {len(report.messages)}")
        if args.out:
            Path(args.out).write_text(
                json.dumps(report.to_json(not args.no_timing), indent=2) + "\n"
            )
            print(f"trace: {args.out}")
        if args.fig:
            from .report import render_episode_figure

            render_episode_figure(grid, report, args.inches_per_rev, args.fig)
            print(f"figure: {args.fig}")
        return EXIT_OK

    results = []
    for seed in seeds:
        try:
            report = _run_one_episode(grid, args, seed)
        except AckTimeout:
            print("episode failed: ack timeout")
            return EXIT_EPISODE
        if report.error == "no_path":
            print("no path")
            return EXIT_NO_PATH
        results.append({"seed": seed, "success": report.success, "final_cell": list(report.final_cell or ())})
    rate = sum(1 for r in results if r["success"]) / len(results)
    print(f"episodes: {len(results)}  success rate: {rate:.1%}")
    if args.out:
        Path(args.out).write_text("\n".join(json.dumps(r) for r in results) + "\n")
        print(f"results: {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    grid = _load_map(args.map)
    if grid is None:
        return EXIT_INPUT
    try:
        host, port = parse_bind(args.bind)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    from .gateway import BindFailure, Gateway

    app = ServeApp(
        grid,
        noise=_noise_from_args(args),
        seed=parse_seed_spec(args.seeds)[0],
        transport=args.transport,
        pacing_bps=args.pacing_bps,
        spec=_wheel_spec_from_args(args),
        max_speed=args.max_speed,
    )
    app.start()
    try:
        gateway = Gateway(app.bus, host, port)
    except BindFailure as e:
        print(f"error: {e}", file=sys.stderr)
        app.stop()
        return EXIT_INPUT
    gateway.start()

    httpd = None
    if args.static:
        import functools
        import http.server
        import threading

        handler = functools.partial(
            http.server.SimpleHTTPRequestHandler, directory=args.static
        )
        httpd = http.server.ThreadingHTTPServer((host, args.http_port), handler)
        threading.Thread(target=httpd.serve_forever, daemon=True).start()
        print(f"console: http://{host}:{httpd.server_address[1]}/", flush=True)

    # Flush so scripted clients reading a pipe can synchronize on the URL.
    print(f"gateway: {gateway.url}", flush=True)
    print("press Ctrl-C to stop", flush=True)
    try:
        import time

        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        if httpd is not None:
            httpd.shutdown()
        gateway.stop()
        app.stop()
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--no-timing", action="store_true", help="zero timing fields in file outputs")


def _add_plant(p: argparse.ArgumentParser):
    """Noise and wheel constants shared by simulate and serve."""
    p.add_argument("--noise", choices=["on", "off"], default="off")
    p.add_argument("--slip-sd", type=float, default=0.05)
    p.add_argument("--overshoot-lo", type=float, default=66.0)
    p.add_argument("--overshoot-hi", type=float, default=190.0)
    p.add_argument("--wheel-base", type=float, default=10.0)
    p.add_argument("--inches-per-rev", type=float, default=8.0)
    p.add_argument("--pulses-per-rev", type=int, default=440)
    p.add_argument("--max-speed", type=float, default=16.0)
    p.add_argument("--transport", choices=["inproc", "tcp"], default="inproc")
    p.add_argument("--pacing-bps", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridbot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a path on a map and print the action list")
    p.add_argument("--map", required=True)
    p.add_argument("--heuristic", choices=[k.value for k in HeuristicKind], default="manhattan")
    p.add_argument("--out", help="write the path overlay map here")
    p.add_argument("--fig", help="render the plan figure here (png)")
    _add_common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run the DFS/BFS/A* comparison benchmark")
    p.add_argument("--sizes", default=DEFAULT_SIZES, help="e.g. 5..30:5 or 5,10,15")
    p.add_argument("--density", type=float, default=0.2)
    p.add_argument("--seeds", default=DEFAULT_SEEDS, help="e.g. 42..61 or 1,2,3")
    p.add_argument("--out", default="bench.csv")
    p.add_argument("--fig", help="figure path (default: csv path with .png)")
    p.add_argument("--no-fig", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="execute a planned episode through the station bus")
    p.add_argument("--map", required=True)
    p.add_argument("--heuristic", choices=[k.value for k in HeuristicKind], default="manhattan")
    p.add_argument("--seed", dest="seeds", default="0", help="single seed")
    p.add_argument("--seeds", dest="seeds", help="seed range, e.g. 1..100")
    p.add_argument("--ack-timeout", type=float, default=30.0)
    p.add_argument("--out", help="write the episode trace JSON here")
    p.add_argument("--fig", help="render the trajectory figure here (png)")
    _add_plant(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run stations + WebSocket gateway for live clients")
    p.add_argument("--map", required=True)
    p.add_argument("--bind", default="127.0.0.1:8400")
    p.add_argument("--seed", dest="seeds", default="0")
    p.add_argument("--static", help="also serve this directory over HTTP (console build)")
    p.add_argument("--http-port", type=int, default=8401)
    _add_plant(p)
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()

    # First pass only to locate --config; then re-parse with file values as
    # defaults so explicit flags keep priority.
    if "--config" in argv:
        probe = argv[argv.index("--config") + 1 :]
        if not probe:
            print("error: --config needs a path", file=sys.stderr)
            return EXIT_INPUT
        try:
            values = load_config(probe[0])
        except (OSError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        bool_keys = {"no_timing", "no_fig"}
        converted = {
            k: (v.lower() in ("1", "true", "yes", "on") if k in bool_keys else v)
            for k, v in values.items()
        }
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                known = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in converted.items() if k in known})
                for a in sp._actions:
                    if a.dest in converted and a.required:
                        a.required = False

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
