"""Time the numba kernels against their pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each row reports
the best wall time over ``N`` repeats for both flavours; numba compilation
happens in a warm-up call and is not timed.
"""

from __future__ import annotations

import argparse
import time
from contextlib import contextmanager

import numpy as np

from measure_norms import _accel
from measure_norms.approx import refinement_distance
from measure_norms.func import DiscreteFunction, lip_seminorm
from measure_norms.lp import FlowProblem, solve_flow
from measure_norms.metric import random_space, shortest_path_closure

KERNELS = ("simplex_loop", "pivot", "lip_ratio", "closure", "dijkstra")


@contextmanager
def flavour(name):
    saved = {k: getattr(_accel, k) for k in KERNELS}
    try:
        for k in KERNELS:
            setattr(_accel, k, getattr(_accel, f"{k}_{name}"))
        yield
    finally:
        for k, v in saved.items():
            setattr(_accel, k, v)


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    space = random_space(1, 60, "euclidean-square")
    s = rng.uniform(-1, 1, 60)
    s[-1] -= s.sum()
    flow = FlowProblem.complete(s, space.dist)
    big = random_space(2, 300, "euclidean-square")
    f = DiscreteFunction(big, rng.uniform(-1, 1, 300))
    w = rng.uniform(0.1, 1.0, (200, 200))
    w = np.triu(w, 1) + np.triu(w, 1).T
    return [
        ("simplex: density LP, n=16", lambda: refinement_distance("triangle", 16)),
        ("flow: 60-node transport", lambda: solve_flow(flow)),
        ("lip_ratio: 300 points", lambda: lip_seminorm(f)),
        ("closure: 200 nodes", lambda: shortest_path_closure(w)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _accel.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'case':32} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8}")
    for label, fn in cases():
        res = {}
        for name in ("numba", "numpy"):
            with flavour(name):
                res[name] = best_of(fn, args.repeat)
        print(f"{label:32} {res['numba']:11.4f} {res['numpy']:11.4f} {res['numpy'] / res['numba']:8.1f}x")


if __name__ == "__main__":
    main()
