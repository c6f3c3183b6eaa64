"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 200]

Times the direct convolution and the compensated sums for a range of N,
the padded-FFT convolution for reference, and a 1000-step RK4 run
(N = 64) on each backend.
"""
import argparse
import time
import timeit

import numpy as np

from ripple import _fallback, kernels
from ripple.evolution import EvolutionConfig, integrate
from ripple.mode_space import ModeVector, conv_fft
from ripple.zero_mode import build_initial


def per_call(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat * 1e6


def run_rk4(impl):
    saved = kernels._impl, kernels.BACKEND
    kernels._impl = impl
    kernels.BACKEND = "compiled" if impl is kernels.compiled else "python"
    try:
        phi = build_initial(ModeVector.from_modes(2 * np.pi, 64, {1: 0.05}))
        t0 = time.perf_counter()
        integrate(phi, EvolutionConfig(1e-3, 1.0))
        return time.perf_counter() - t0
    finally:
        kernels._impl, kernels.BACKEND = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    have = kernels.compiled is not None
    print(f"compiled extension: {'yes' if have else 'no'}; threads={kernels.threads()}")
    print(f"{'N':>5} {'batch':>5} {'direct/C':>10} {'direct/py':>10} {'fft':>10} "
          f"{'sum/C':>8} {'sum/py':>8}   (microseconds per call)")
    for N in (8, 16, 32, 64, 128, 256):
        for batch in (1, 100):
            a = rng.normal(size=(batch, N + 1)) + 1j * rng.normal(size=(batch, N + 1))
            a[:, 0] = a[:, 0].real
            c_conv = per_call(lambda: kernels.compiled.conv_direct(a, a, 1), args.repeat) if have else float("nan")
            p_conv = per_call(lambda: _fallback.conv_direct(a, a, 1), max(1, args.repeat // 10))
            f_conv = per_call(lambda: conv_fft(a, a), args.repeat)
            c_sum = per_call(lambda: kernels.compiled.weighted_sq_sum(a, 2), args.repeat) if have else float("nan")
            p_sum = per_call(lambda: _fallback.weighted_sq_sum(a, 2), args.repeat)
            print(f"{N:>5} {batch:>5} {c_conv:>10.1f} {p_conv:>10.1f} {f_conv:>10.1f} "
                  f"{c_sum:>8.1f} {p_sum:>8.1f}")
    print()
    if have:
        print(f"RK4, N=64, 1000 steps, compiled: {run_rk4(kernels.compiled):.2f} s")
    print(f"RK4, N=64, 1000 steps, fallback: {run_rk4(_fallback):.2f} s")


if __name__ == "__main__":
    main()
