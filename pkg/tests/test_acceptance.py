"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside pytest's own output.
"""

import json
import math
import random
import threading
import time
from contextlib import contextmanager

import pytest

from gridbot.bench import benchmark, mean_expansions, random_solvable_grid, write_csv
from gridbot.bus import Bus, BusMessage, SerialFrameCorrupt, frame_decode, frame_encode
from gridbot.controller import ControllerParams, StepCommand, run_step
from gridbot.drive import DriveSim, NoiseParams, open_loop_step
from gridbot.grid import Cell
from gridbot.kinematics import Pose, WheelSpec, integrate_pose, normalize_angle
from gridbot.planner import Action, HeuristicKind, astar, bfs
from gridbot.stations import run_episode, validate_ack_gating

SPEC = WheelSpec()
PULSE_EQUIV_IN = SPEC.inches_per_rev / SPEC.pulses_per_rev  # 8/440 ~ 0.018 in


@contextmanager
def criterion(num: int, title: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num}: {title} ({time.perf_counter() - t0:.1f}s)")
        raise
    print(f"[PASS] criterion {num}: {title} ({time.perf_counter() - t0:.1f}s)")


def test_criterion_1_optimality_oracle():
    with criterion(1, "A* path cost equals BFS oracle on 216 random grids, all heuristics"):
        t0 = time.perf_counter()
        grids = 0
        for size in (5, 10, 15, 20, 25, 30):
            for density in (0.0, 0.1, 0.2, 0.3):
                for seed in range(9):
                    grid = random_solvable_grid(size, size, density, seed)
                    grids += 1
                    want = bfs(grid).cost
                    for kind in HeuristicKind:
                        got = astar(grid, kind).cost
                        assert got == want, (size, density, seed, kind, got, want)
        assert grids >= 200
        assert time.perf_counter() - t0 <= 30.0


def test_criterion_2_fig8_qualitative(tmp_path):
    with criterion(2, "mean A*(Manhattan) expansions < BFS and < DFS at every size"):
        t0 = time.perf_counter()
        sizes = [(n, n) for n in (5, 10, 15, 20, 25, 30)]
        seeds = list(range(42, 62))  # documented default seed set, 20 seeds
        rows = benchmark(sizes, 0.2, seeds)
        write_csv(rows, str(tmp_path / "fig8.csv"))
        assert (tmp_path / "fig8.csv").stat().st_size > 0
        means = mean_expansions(rows)
        for n, _ in sizes:
            a = means[(n, n, "astar-manhattan")]
            assert a < means[(n, n, "bfs")], f"A* not under BFS at {n}x{n}"
            assert a < means[(n, n, "dfs")], f"A* not under DFS at {n}x{n}"
        assert time.perf_counter() - t0 <= 10.0


def test_criterion_3_kinematics_exactness():
    with criterion(3, "straight/spin invariance 1e-9; arc vs 1e4-substep oracle 1e-6"):
        # Straight motion: equal wheel speeds mean omega is exactly zero.
        p = integrate_pose(Pose(0, 0, 0.25), 11.0, 11.0, 1.0, SPEC)
        assert p.theta == 0.25
        assert abs(p.y - 11.0 * math.sin(0.25)) < 1e-9

        # Spin in place: position invariant within 1e-9.
        for vr in (2.0, -7.5, 16.0):
            p = integrate_pose(Pose(3, -4, 1.1), vr, -vr, 0.8, SPEC)
            assert math.hypot(p.x - 3, p.y + 4) < 1e-9

        # Exact arc vs fine-grained numeric integration within 1e-6 in
        # over 1 s segments with |v| <= 16 in/s.
        rng = random.Random(33)
        cases = [(8.0, 8.0), (16.0, 12.0), (5.0, -5.0), (-10.0, -6.0)] + [
            (rng.uniform(-16, 16), rng.uniform(-16, 16)) for _ in range(8)
        ]
        for vr, vl in cases:
            start = Pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3))
            exact = integrate_pose(start, vr, vl, 1.0, SPEC)
            x, y, theta = start.x, start.y, start.theta
            v = (vr + vl) / 2.0
            omega = (vr - vl) / SPEC.wheel_base
            h = 1.0 / 10_000
            for _ in range(10_000):
                mid = theta + omega * h / 2.0
                x += v * h * math.cos(mid)
                y += v * h * math.sin(mid)
                theta += omega * h
            assert math.hypot(exact.x - x, exact.y - y) < 1e-6, (vr, vl)

        # Composition: dt then dt' equals dt + dt' within 1e-9.
        for vr, vl in ((8.0, 8.0), (6.0, -6.0), (12.0, 4.0), (-9.0, -1.0)):
            one = integrate_pose(Pose(), vr, vl, 0.9, SPEC)
            two = integrate_pose(integrate_pose(Pose(), vr, vl, 0.6, SPEC), vr, vl, 0.3, SPEC)
            assert abs(one.x - two.x) < 1e-9
            assert abs(one.y - two.y) < 1e-9
            assert abs(normalize_angle(one.theta - two.theta)) < 1e-9


def test_criterion_4_noiseless_closed_loop():
    with criterion(4, "noiseless FORWARD-1 settles at exactly 440 pulses, pose within 8/440 in"):
        sim = DriveSim(noise=NoiseParams.off(), seed=0)
        report = run_step(StepCommand(Action.FORWARD, 1), sim)
        assert report.ok
        assert sim.read_encoders() == (440, 440)
        assert (report.pulse_error_l, report.pulse_error_r) == (0, 0)
        assert abs(sim.pose.x - 8.0) <= PULSE_EQUIV_IN
        assert abs(sim.pose.y) <= PULSE_EQUIV_IN


def test_criterion_5_open_loop_calibration():
    with criterion(5, "1000 uncorrected steps: overshoot in [66, 190] for >= 99% of samples"):
        samples = []
        for seed in range(1000):
            sim = DriveSim(noise=NoiseParams(), seed=seed)
            left, right = open_loop_step(sim)
            samples.extend((left, right))
        inside = sum(1 for s in samples if 66 <= s <= 190)
        assert inside / len(samples) >= 0.99, f"only {inside}/{len(samples)} inside"


def test_criterion_6_closed_loop_residual():
    with criterion(6, "500 noisy FORWARD-1 steps: mean distance error <= 0.36 + 0.15 in"):
        params = ControllerParams()
        errors = []
        gaps = []
        for seed in range(500):
            sim = DriveSim(noise=NoiseParams(), seed=seed)
            report = run_step(StepCommand(Action.FORWARD, 1), sim, params)
            assert report.ok
            errors.append(report.distance_error_in)
            gaps.append(abs(report.pulse_error_r - report.pulse_error_l))
        assert sum(errors) / len(errors) <= 0.36 + 0.15
        assert sum(gaps) / len(gaps) <= params.settle_tolerance


def test_criterion_7_bus_properties():
    with criterion(7, "FIFO + frame round-trip over 1e5 messages; all payload corruptions caught"):
        # Per-publisher FIFO over 1e5 randomized messages from 4 threads.
        bus = Bus()
        for t in ("/a", "/b", "/c"):
            bus.register_topic(t)
        seen: dict[tuple[str, str], list[int]] = {}
        lock = threading.Lock()

        def handler(msg):
            key = (msg.publisher, msg.topic)
            with lock:
                seen.setdefault(key, []).append(msg.seq)

        bus.subscribe(None, handler)

        def blast(name: str, n: int, seed: int):
            rng = random.Random(seed)
            for _ in range(n):
                bus.publish(rng.choice(("/a", "/b", "/c")), {}, name)

        threads = [
            threading.Thread(target=blast, args=(f"p{i}", 25_000, i)) for i in range(4)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        total = 0
        for key, seqs in seen.items():
            assert seqs == list(range(1, len(seqs) + 1)), f"FIFO violation for {key}"
            total += len(seqs)
        assert total == 100_000

        # Frame round-trip identity over 1e5 randomized messages.
        rng = random.Random(7)
        scalars = [0, -1, 17, 3.5, -0.25, True, False, None, "text", "x y\nz", ""]
        for i in range(100_000):
            payload = {
                f"k{j}": rng.choice(scalars) for j in range(rng.randrange(0, 5))
            }
            msg = BusMessage(rng.choice(("/pose", "/drive/cmd", "/x")), i, payload)
            assert frame_decode(frame_encode(msg)) == msg

        # Every single-byte payload corruption detected.
        msg = BusMessage("/drive/ack", 3, {"pulse_error_l": 7, "pulse_error_r": -2, "ok": True})
        frame = frame_encode(msg)
        body = json.dumps(
            {"pulse_error_l": 7, "pulse_error_r": -2, "ok": True}, separators=(",", ":")
        ).encode()
        start = frame.index(body)
        for offset in range(len(body)):
            for mask in range(1, 256):
                corrupted = bytearray(frame)
                corrupted[start + offset] ^= mask
                with pytest.raises(SerialFrameCorrupt):
                    frame_decode(bytes(corrupted))


def test_criterion_8_end_to_end_episodes():
    with criterion(8, "50 noiseless exact replays; >= 95% noisy goal arrival; ack-gating"):
        t0 = time.perf_counter()

        for seed in range(50):
            grid = random_solvable_grid(10, 10, 0.2, seed)
            rep = run_episode(grid, noise=NoiseParams.off(), seed=seed)
            assert rep.success, f"noiseless episode {seed} failed"
            assert rep.executed_cells() == rep.planned_path, f"replay drift at seed {seed}"
            assert validate_ack_gating(rep.messages), f"ack gating broken at seed {seed}"

        arrived = 0
        for seed in range(100):
            grid = random_solvable_grid(10, 10, 0.2, 1000 + seed)
            rep = run_episode(grid, noise=NoiseParams(), seed=seed)
            assert validate_ack_gating(rep.messages), f"ack gating broken at noisy seed {seed}"
            if rep.final_cell == rep.goal:
                arrived += 1
        assert arrived >= 95, f"only {arrived}/100 noisy episodes reached the goal"

        assert time.perf_counter() - t0 <= 60.0
