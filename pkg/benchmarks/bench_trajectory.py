#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-Python trajectory loops.

Runs the same batch of classified trajectories on both backends and reports
wall time, steps per second, and the speedup.  The two loops are written to be
bit-identical; this script also asserts that on the workload it runs.
"""

import math
import time

import numpy as np

from cayleyphase import Couplings, derive_params
from cayleyphase import _trajectory_py

try:
    from cayleyphase import _trajectory  # type: ignore[attr-defined]
except ImportError:
    _trajectory = None

# a mix of behaviours: fast fixed points, two- and four-cycles, and aperiodic
# competing-coupling points that exhaust the budget (the dominant cost)
POINTS = [
    Couplings(0.1, 0.05, 3.0),
    Couplings(1.0, 0.15, 0.6),
    Couplings(0.0, -math.log(2.0), 1.0),
    Couplings(1.0, -0.6, 0.30),
    Couplings(1.0, -0.4, 0.36),
]
STARTS_PER_POINT = 8
MAX_ITER = 20000


def workload():
    rng = np.random.default_rng(42)
    tasks = []
    for c in POINTS:
        p = derive_params(c)
        for _ in range(STARTS_PER_POINT):
            u0 = tuple(10.0 ** rng.uniform(-2.0, 2.0, size=4))
            m = max(u0)
            tasks.append((p.a, p.b, *(x / m for x in u0)))
    return tasks


def run(backend, tasks):
    t0 = time.perf_counter()
    outs = []
    steps = 0
    for args in tasks:
        out = backend.run_trajectory(*args, MAX_ITER, 1e-12, 200, 64)
        outs.append(out)
        steps += out[2]
    return time.perf_counter() - t0, steps, outs


def main():
    tasks = workload()
    t_py, steps, outs_py = run(_trajectory_py, tasks)
    print(f"pure python : {t_py:8.3f} s   {steps / t_py:12.0f} steps/s   ({steps} steps)")
    if _trajectory is None:
        print("compiled    : not built (install with Cython and a C compiler)")
        return
    t_cy, steps_cy, outs_cy = run(_trajectory, tasks)
    print(f"compiled    : {t_cy:8.3f} s   {steps_cy / t_cy:12.0f} steps/s   ({steps_cy} steps)")
    print(f"speedup     : {t_py / t_cy:8.1f}x")
    assert outs_py == outs_cy, "backends diverged; this is a bug"
    print("backends bit-identical on this workload")


if __name__ == "__main__":
    main()
