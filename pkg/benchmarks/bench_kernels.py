"""Benchmark the block-positivity kernel: numba backend vs pure numpy.

Runs block_minimize on random Hermitian Choi tensors of the requested sizes
with identical starts for both backends and reports the median wall time and
speedup.  The first numba call is a warm-up so JIT compilation stays out of
the numbers.

    python benchmarks/bench_kernels.py --sizes 2x2 3x3 4x4 --restarts 64
"""

import argparse
import time

import numpy as np

from conecert._kernels import available_backends, block_minimize


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def bench_case(n, m, restarts, iters, reps, seed):
    rng = np.random.default_rng(seed)
    d = n * m
    g = crandn(rng, d, d)
    c4 = ((g + g.conj().T) / 2).reshape(n, m, n, m)
    starts = crandn(rng, restarts, m)
    out = {}
    for backend in available_backends():
        block_minimize(c4, starts, iters, 1e-13, -np.inf, backend)  # warm-up
        times = []
        val = None
        for _ in range(reps):
            t0 = time.perf_counter()
            val, _, _, _ = block_minimize(c4, starts, iters, 1e-13, -np.inf, backend)
            times.append(time.perf_counter() - t0)
        out[backend] = (float(np.median(times)), val)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+", default=["2x2", "3x3", "4x4", "4x6"],
                        help="problem sizes as NxM")
    parser.add_argument("--restarts", type=int, default=64)
    parser.add_argument("--iters", type=int, default=200)
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'size':>6} " + " ".join(f"{b + ' (ms)':>12}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for size in args.sizes:
        n, m = (int(x) for x in size.lower().split("x"))
        result = bench_case(n, m, args.restarts, args.iters, args.reps, args.seed)
        cells = " ".join(f"{result[b][0] * 1e3:12.3f}" for b in backends)
        line = f"{size:>6} {cells}"
        if "numba" in result and "numpy" in result:
            line += f"   {result['numpy'][0] / result['numba'][0]:7.2f}x"
            vals = [result[b][1] for b in backends]
            assert abs(vals[0] - vals[1]) < 1e-8 * max(1.0, abs(vals[0]))
        print(line)


if __name__ == "__main__":
    main()
