"""Time the numba and numpy kernel paths side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--max-n 6]

Each timing is the best of ``--repeat`` calls after one warm-up call, so
numba compilation is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from corrbath import kernels
from corrbath.dynamics import random_density_matrix
from corrbath.model import uniform_rates


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(max_n):
    rng = np.random.default_rng(0)
    # the numpy reference fill is dense Kronecker algebra: ~3 s at n = 5, ~60x more per extra spin
    for n in range(2, min(max_n, 5) + 1):
        rates = uniform_rates(n, 0.7, 0.4)
        h = np.zeros((1 << n, 1 << n), dtype=np.complex128)
        yield f"fill_superop n={n}", lambda r=rates, n=n, h=h: kernels.fill_superop(n, r.a_matrix, r.b_matrix, h)
    for n in range(3, max_n + 2):
        rates = uniform_rates(n, 1.0, 0.6)
        rho = random_density_matrix(1 << n, rng)
        h = np.zeros((1 << n, 1 << n), dtype=np.complex128)

        def rhs_case(n=n, r=rates, rho=rho, h=h):
            # re-prepare inside so each backend builds its own callable
            f = kernels.prepare_rhs(n, r.a_matrix, r.b_matrix, h)
            for _ in range(10):
                f(rho)

        yield f"rhs x10 n={n}", rhs_case
    for n in (6, 8, 10):
        rho = random_density_matrix(1 << n, rng)
        dims = [2] * n
        keep = [k < 2 for k in range(n)]
        yield f"partial_trace n={n}", lambda rho=rho, dims=dims, keep=keep: kernels.partial_trace(rho, dims, keep)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--max-n", type=int, default=6)
    args = p.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fn in cases(args.max_n):
        with kernels.use_backend("numba"):
            t_nb = best_of(fn, args.repeat)
        with kernels.use_backend("numpy"):
            t_np = best_of(fn, args.repeat)
        print(f"{name:<22}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>10.2f}", flush=True)


if __name__ == "__main__":
    main()
