"""Benchmark the implicit-midpoint kernel: compiled extension vs pure Python.

Runs the same torus trajectory through every importable backend and reports
steps/second, the speedup, and the largest trajectory deviation between
backends (the two kernels mirror each other operation for operation, so it
should sit at rounding level).

    python benchmarks/benchmark_integrator.py [--steps N] [--repeats K]
"""

import argparse
import math
import time

import numpy as np

from rotorlab._kernels import available_backends


def run(kernel, steps, dt=1e-3):
    z0 = np.array([math.pi / 2, 0.0, 0.0, 0.4, 1.2, 0.3])
    out = np.empty((steps + 1, 6))
    t0 = time.perf_counter()
    status, done = kernel.integrate_midpoint(
        2, 1.0, 3.0, 1.0, 2.0, 1.0,  # torus R=1 L=3, M=1 I=2, sig=+1
        1, 0.3,                      # cosine well, V0=0.3
        z0, dt, steps, 1e-13, 100, 1e-6, out,
    )
    elapsed = time.perf_counter() - t0
    assert status == 0 and done == steps
    return elapsed, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}   steps: {args.steps}")

    best = {}
    trajectories = {}
    for name, kernel in backends.items():
        times = []
        for _ in range(args.repeats):
            elapsed, out = run(kernel, args.steps)
            times.append(elapsed)
        best[name] = min(times)
        trajectories[name] = out
        print(f"{name:10s} {best[name]:8.3f} s   {args.steps / best[name]:12.0f} steps/s")

    if "compiled" in best and "python" in best:
        print(f"speedup    {best['python'] / best['compiled']:8.1f} x")
        dev = np.abs(trajectories["python"] - trajectories["compiled"]).max()
        print(f"max trajectory deviation between backends: {dev:.3e}")


if __name__ == "__main__":
    main()
