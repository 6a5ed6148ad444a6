#!/usr/bin/env python3
"""Benchmark the jitted grid kernels against the pure-numpy fallback.

Times the truncated-transform grid evaluation and the squared-mask grid on a
deep periodic sequence, once per backend, and prints a small table.  The
first numba call includes JIT compilation; a warmup run excludes it from the
timings.

Usage:
    python benchmarks/bench_kernels.py [--points 200000] [--depth 24] [--repeats 3]
"""

import argparse
import time

import numpy as np

from moranspec import fourier, kernels, periodic


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--depth", type=int, default=24)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    seq = periodic([(4, [0, 1]), (6, [0, 2, 4]), (8, [0, 1, 2, 3])])
    pos, offsets = fourier.atom_positions(seq, args.depth)
    xi = np.linspace(-4.0, 4.0, args.points)
    digits = np.array([0.0, 2.0, 3.0, 4.0, 5.0, 7.0])

    if not kernels.HAVE_NUMBA:
        print("numba unavailable or disabled (MORANSPEC_PURE_NUMPY=1): timing numpy only")

    rows = []
    for name, force in (("numpy", "numpy"), ("numba", "numba")):
        if force == "numba" and kernels.numba is None:
            continue
        # warmup (includes JIT compilation for the numba path)
        kernels.mu_hat_grid(pos, offsets, xi[:64], force=force)
        kernels.mask_abs2_grid(digits, xi[:64], force=force)
        t_mu = time_call(lambda f=force: kernels.mu_hat_grid(pos, offsets, xi, force=f),
                         args.repeats)
        t_mask = time_call(lambda f=force: kernels.mask_abs2_grid(digits, xi, force=f),
                           args.repeats)
        rows.append((name, t_mu, t_mask))

    a = kernels.mu_hat_grid(pos, offsets, xi, force="numpy")
    if kernels.numba is not None:
        b = kernels.mu_hat_grid(pos, offsets, xi, force="numba")
        agree = np.max(np.abs(a - b))
    else:
        agree = 0.0

    print(f"\n{args.points} grid points, product depth {args.depth}, best of {args.repeats}")
    print(f"{'backend':8s} {'mu_hat_grid':>14s} {'mask_abs2_grid':>16s}")
    for name, t_mu, t_mask in rows:
        print(f"{name:8s} {t_mu:12.4f} s {t_mask:14.4f} s")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:11.2f} x {rows[0][2] / rows[1][2]:13.2f} x")
    print(f"max |numpy - numba| over the grid: {agree:.3e}")


if __name__ == "__main__":
    main()
