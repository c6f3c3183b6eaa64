"""Pure numpy/stdlib versions of the compiled kernels.

Same signatures and row semantics as ``ripple._kernels``.
"""
import math

import numpy as np


def conv_direct(a, b, threads=1):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    R, n1 = a.shape
    N = n1 - 1
    # full index set -N..N, position k + N
    b_full = np.concatenate([np.conj(b[:, :0:-1]), b], axis=1)
    out = np.zeros((R, N + 1), dtype=np.complex128)
    for k in range(-N, N + 1):
        ak = a[:, k] if k >= 0 else np.conj(a[:, -k])
        lo = max(0, k - N)
        hi = min(N, k + N)
        # m = n - k for n in lo..hi
        out[:, lo:hi + 1] += ak[:, None] * b_full[:, lo - k + N:hi - k + N + 1]
    return out


def weighted_sq_sum(c, power):
    c = np.asarray(c, dtype=np.complex128)
    n = np.arange(c.shape[1], dtype=np.float64)
    terms = (n ** power) * (c.real ** 2 + c.imag ** 2)
    return np.array([math.fsum(row[1:].tolist()) for row in terms], dtype=np.float64)
