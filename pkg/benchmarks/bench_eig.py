#!/usr/bin/env python3
"""Benchmark the compiled eigensolver kernel against the numpy fallback.

Times full symmetric eigendecompositions across matrix sizes, plus one
pipeline-level row (the covariance descriptor of a default 43-joint
sequence, whose cost is dominated by the eigensolve).  The crossover
motivates the ``auto`` backend policy: the compiled kernel wins on small
matrices where call overhead dominates, LAPACK's blocked solver wins on
large ones.

Usage: python benchmarks/bench_eig.py [--repeats N]
"""

import argparse
import time

import numpy as np

from emogait.eigsolver import available_backends, eigh_descending, use_backend
from emogait.features import describe_sequence
from emogait.synth import DEFAULT_TORSO_JOINTS, default_gait_params, generate_dataset

DIMS = (4, 8, 16, 32, 64, 128, 258)


def time_call(fn, repeats):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_eig(repeats):
    rng = np.random.default_rng(0)
    rows = []
    for dim in DIMS:
        a = rng.standard_normal((dim, dim))
        a = 0.5 * (a + a.T)
        timings = {}
        for backend in available_backends():
            with use_backend(backend):
                reps = max(3, min(repeats, 20000 // (dim * dim // 16 + 1)))
                timings[backend] = time_call(lambda: eigh_descending(a), reps)
        rows.append((f"eigh {dim}x{dim}", timings))
    return rows


def bench_pipeline(repeats):
    params = default_gait_params(seed=0, n_joints=43, fps=60.0, duration=1.0)
    seq = generate_dataset(params, 1, 1)[0]
    timings = {}
    for backend in available_backends():
        with use_backend(backend):
            timings[backend] = time_call(
                lambda: describe_sequence(seq, DEFAULT_TORSO_JOINTS, 1e-9),
                max(3, repeats // 4),
            )
    return [("descriptor 43 joints (dim 258)", timings)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=25)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the numpy fallback is available")

    rows = bench_eig(args.repeats) + bench_pipeline(args.repeats)
    names = list(backends)
    header = f"{'case':<32}" + "".join(f"{b + ' [ms]':>16}" for b in names)
    if len(names) == 2:
        header += f"{'ratio':>10}"
    print(header)
    print("-" * len(header))
    for case, timings in rows:
        cells = "".join(f"{1e3 * timings[b]:>16.3f}" for b in names)
        line = f"{case:<32}" + cells
        if len(names) == 2:
            line += f"{timings[names[0]] / timings[names[1]]:>10.2f}"
        print(line)


if __name__ == "__main__":
    main()
