#!/usr/bin/env python3
"""Compare the numba kernels against the pure-numpy fallbacks.

Usage:
    python benchmarks/bench_backends.py [--quick]

Covers the four hot paths: batch program evaluation, the enumeration scan
that drives learner index advances, the scanline ray caster, and the
recurrent parity sweep.  The parity sweep is the dramatic one: its inner
loop collapses under LLVM, while the vectorized numpy simulation has to pay
for every lane step (total work grows with n^2), so the numpy column uses a
smaller n and the table reports per-unit-work throughput alongside raw time.
"""

import argparse
import time

import numpy as np

from conceptlab import dsl, kernels

try:
    kernels._build_numba()
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def timeit(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def row(name, t_np, t_nb, note=""):
    speed = "" if t_nb is None else f"{t_np / t_nb:8.1f}x"
    nb = "      --" if t_nb is None else f"{t_nb * 1e3:8.2f}"
    print(f"{name:<28} {t_np * 1e3:8.2f} {nb} {speed:>9}  {note}")


def bench_tape(quick):
    n_programs = 200 if quick else 1000
    xs = np.arange(10_000, dtype=np.int64)
    tapes = [dsl.compile_tape(dsl.enumerate_program(i)) for i in range(n_programs)]

    def run_numpy():
        for ops, args in tapes:
            kernels.eval_tape_batch_numpy(ops, args, xs)

    def run_numba():
        for ops, args in tapes:
            kernels.eval_tape_batch_numba(ops, args, xs)

    if HAVE_NUMBA:
        run_numba()  # compile outside the timer
    t_np = timeit(run_numpy, 2)
    t_nb = timeit(run_numba, 3) if HAVE_NUMBA else None
    row("tape eval (10k inputs)", t_np, t_nb, f"{n_programs} programs")


def bench_scan(quick):
    count = 2000 if quick else 20_000
    opss, argss = [], []
    for i in range(count):
        ops, args = dsl.compile_tape(dsl.enumerate_program(i))
        opss.append(ops)
        argss.append(args)
    starts = np.zeros(count + 1, dtype=np.int64)
    starts[1:] = np.cumsum([o.shape[0] for o in opss])
    ops_flat = np.concatenate(opss)
    args_flat = np.concatenate(argss)
    xs = np.arange(64, dtype=np.int64)
    ys = ((xs % 5) == 0).astype(np.uint8)  # multiples of 5: a deep scan

    def run_numpy():
        kernels.scan_first_compatible_numpy(ops_flat, args_flat, starts, xs, ys)

    def run_numba():
        kernels.scan_first_compatible_numba(ops_flat, args_flat, starts, xs, ys)

    if HAVE_NUMBA:
        run_numba()
    t_np = timeit(run_numpy, 2)
    t_nb = timeit(run_numba, 3) if HAVE_NUMBA else None
    row("enumeration scan", t_np, t_nb, f"{count} candidates, 64 obs")


def bench_raycast(quick):
    rng = np.random.default_rng(0)
    segs = rng.uniform(-5, 5, size=(60, 4))
    angles = rng.uniform(0.2, 2.9, size=1024)
    dxs, dys = np.cos(angles), np.sin(angles)
    repeats = 50 if quick else 200

    def run_numpy():
        for _ in range(repeats):
            kernels.raycast_numpy(0.0, 0.0, dxs, dys, segs)

    def run_numba():
        for _ in range(repeats):
            kernels.raycast_numba(0.0, 0.0, dxs, dys, segs)

    if HAVE_NUMBA:
        run_numba()
    t_np = timeit(run_numpy, 2)
    t_nb = timeit(run_numba, 3) if HAVE_NUMBA else None
    row("raycast (1024 rays x 60)", t_np, t_nb, f"{repeats} frames")


def bench_parity(quick):
    n_np = 30_000 if quick else 100_000
    n_nb = 10**6

    t_np = timeit(lambda: kernels.parity_sweep_numpy(n_np), 1)
    if HAVE_NUMBA:
        kernels.parity_sweep_numba(10)
        t_nb = timeit(lambda: kernels.parity_sweep_numba(n_nb), 1)
    else:
        t_nb = None
    work_np = n_np * (n_np + 1) / 2
    work_nb = n_nb * (n_nb + 1) / 2
    print(
        f"{'parity sweep':<28} numpy n<={n_np}: {t_np:6.2f}s "
        f"({work_np / t_np / 1e9:.2f}G lane-steps/s)"
    )
    if t_nb is not None:
        print(
            f"{'':<28} numba n<={n_nb}: {t_nb:6.2f}s "
            f"({work_nb / t_nb / 1e9:.2f}G lane-steps/s)"
        )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    print(f"numba available: {HAVE_NUMBA}")
    print(f"{'kernel':<28} {'numpy ms':>8} {'numba ms':>8} {'speedup':>9}")
    bench_tape(args.quick)
    bench_scan(args.quick)
    bench_raycast(args.quick)
    bench_parity(args.quick)


if __name__ == "__main__":
    main()
