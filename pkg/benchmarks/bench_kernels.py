#!/usr/bin/env python3
"""Benchmark the hot kernels: numba build vs pure-numpy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py

Requires numba for the comparison; without it only the numpy path times.
"""

import math
import time

import numpy as np

from weakslit import _kernels
from weakslit._accel import NUMBA_AVAILABLE


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm-up (and JIT compile)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def two_packet_arrays():
    w = np.array([1 / math.sqrt(2), -1 / math.sqrt(2)], dtype=np.complex128)
    x0 = np.array([-10.0, 10.0])
    p0 = np.array([2.0, -2.0])
    d = np.array([1.0, 1.0])
    ms = np.array([1.0, 1.0])
    return w, x0, p0, d, ms


def bench_gauss_mixture():
    w, x0, p0, d, ms = two_packet_arrays()
    x = np.linspace(-40.0, 40.0, 200_000)
    args = (x, 2.5, w, x0, p0, d, ms, 1.0)
    return "gauss_mixture_eval (200k points)", args, \
        _kernels.gauss_mixture_eval_numpy


def bench_propagate():
    w, x0, p0, d, ms = two_packet_arrays()
    xs = np.linspace(-40.0, 40.0, 2048)
    psi0, _ = _kernels.gauss_mixture_eval_numpy(xs, 0.0, w, x0, p0, d, ms, 1.0)
    args = (psi0, xs, float(xs[1] - xs[0]), xs, 0.0, 2.5, 1.0, 1.0)
    return "propagate_kernel (2048 -> 2048)", args, \
        _kernels.propagate_kernel_numpy


def bench_sine_series():
    rng = np.random.default_rng(1)
    coeffs = (rng.normal(size=(768, 64)) + 1j * rng.normal(size=(768, 64)))
    coeffs /= np.linalg.norm(coeffs)
    kx = np.arange(1, 769) * math.pi / 120.0
    ky = np.arange(1, 65) * math.pi / 40.0
    xs = np.ascontiguousarray(np.linspace(-12.0, 12.0, 22))
    ys = np.ascontiguousarray(np.linspace(-8.0, -2.0, 22))
    args = (coeffs, kx, ky, math.sqrt(2 / 120.0), math.sqrt(2 / 40.0),
            -60.0, -25.0, xs, ys)
    return "sine_series_eval (768x64 modes, 22 pts)", args, \
        _kernels.sine_series_eval_numpy


def bench_rk4_ensemble():
    w, x0, p0, d, ms = two_packet_arrays()
    starts = np.linspace(-12.0, 12.0, 500)
    args = (starts, 0.0, 1e-2, 1000, 1000, w, x0, p0, d, ms, 1.0, 1.0,
            1e-12, 50.0)
    return "rk4_free_mixture_ensemble (500 x 1000 steps)", args, \
        _kernels.rk4_free_mixture_ensemble_numpy


def main():
    cases = [bench_gauss_mixture(), bench_propagate(), bench_sine_series(),
             bench_rk4_ensemble()]
    print(f"{'kernel':48s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, args, numpy_fn in cases:
        t_np = timeit(numpy_fn, *args)
        if NUMBA_AVAILABLE:
            numba_fn = getattr(_kernels, numpy_fn.__name__.replace("_numpy",
                                                                   "_numba"))
            t_nb = timeit(numba_fn, *args)
            print(f"{name:48s} {t_np * 1e3:8.2f}ms {t_nb * 1e3:8.2f}ms "
                  f"{t_np / t_nb:7.1f}x")
        else:
            print(f"{name:48s} {t_np * 1e3:8.2f}ms {'n/a':>10s} {'':>8s}")


if __name__ == "__main__":
    main()
