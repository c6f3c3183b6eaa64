"""Truncated Fourier data for real L-periodic fields.

Only the coefficients c_0..c_N are stored; c_{-n} = conj(c_n) is implied,
so a stored vector always describes a real field. Array helpers in this
module accept a trailing mode axis of length N+1 and broadcast over any
leading (batch) axes; the ``ModeVector`` wrappers are the public surface.
"""
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import kernels
from .errors import ConfigurationError

IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModeVector:
    """Coefficients c_0..c_N of a real field of period ``L``."""

    L: float
    coeffs: np.ndarray

    def __post_init__(self):
        L = float(self.L)
        if not np.isfinite(L) or L <= 0:
            raise ConfigurationError(f"period must be positive, got {self.L!r}")
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).reshape(-1)
        if c.size < 2:
            raise ConfigurationError("truncation order N must be >= 1")
        if not np.all(np.isfinite(c)):
            raise ConfigurationError("coefficients must be finite")
        if abs(c[0].imag) > IMAG_TOL * max(1.0, abs(c[0].real)):
            raise ConfigurationError(f"mean coefficient must be real, got {c[0]}")
        c[0] = c[0].real
        c.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    @property
    def mean(self) -> float:
        return float(self.coeffs[0].real)

    @classmethod
    def zeros(cls, L, N):
        return cls(L, np.zeros(N + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, L, N, modes, mean=0.0):
        """Build from a mapping ``{n: value}`` with 1 <= n <= N."""
        c = np.zeros(N + 1, dtype=np.complex128)
        c[0] = mean
        for n, value in dict(modes).items():
            if not 1 <= int(n) <= N:
                raise ConfigurationError(f"mode index {n} outside 1..{N}")
            c[int(n)] = value
        return cls(L, c)

    def with_mean(self, mean):
        c = self.coeffs.copy()
        c[0] = mean
        return ModeVector(self.L, c)

    def full(self):
        """Coefficients for n = -N..N (index n + N)."""
        return full_spectrum(self.coeffs)

    def __sub__(self, other):
        _check_compatible(self, other)
        return ModeVector(self.L, self.coeffs - other.coeffs)

    def __add__(self, other):
        _check_compatible(self, other)
        return ModeVector(self.L, self.coeffs + other.coeffs)


@dataclass(frozen=True)
class FieldSamples:
    xs: np.ndarray
    values: np.ndarray


def _check_compatible(v, w):
    if v.N != w.N or v.L != w.L:
        raise ConfigurationError(
            f"incompatible mode vectors: (L={v.L}, N={v.N}) vs (L={w.L}, N={w.N})")


def full_spectrum(c):
    c = np.asarray(c)
    return np.concatenate([np.conj(c[..., :0:-1]), c], axis=-1)


def wavenumbers(N, L):
    """Angular wavenumbers 2*pi*n/L for n = 0..N."""
    return 2.0 * np.pi * np.arange(N + 1) / L


# -- norms -----------------------------------------------------------------

def energies(c):
    """(S2, S0) over the full implied index set, batched over leading axes."""
    c = np.asarray(c, dtype=np.complex128)
    flat = c.reshape(-1, c.shape[-1])
    s2 = 2.0 * kernels.weighted_sq_sum(flat, 2)
    s0 = 2.0 * kernels.weighted_sq_sum(flat, 0)
    shape = c.shape[:-1]
    return s2.reshape(shape), s0.reshape(shape)


def h_norm_array(c):
    c = np.asarray(c, dtype=np.complex128)
    s2, _ = energies(c)
    return np.sqrt(np.abs(c[..., 0]) ** 2 + s2)


def h_norm(v: ModeVector) -> float:
    """H-norm (|v_0|^2 + sum_{n != 0} n^2 |v_n|^2)^(1/2)."""
    return float(h_norm_array(v.coeffs))


def tail_energy(v: ModeVector):
    """Return ``(S2, S0)``: sums of n^2 |v_n|^2 and |v_n|^2 over n != 0."""
    s2, s0 = energies(v.coeffs)
    return float(s2), float(s0)


# -- products ----------------------------------------------------------------

def padded_length(N):
    return scipy.fft.next_fast_len(4 * N + 1, real=True)


def to_grid(c, num_points):
    """Real samples of the truncated series on ``num_points`` uniform points."""
    c = np.asarray(c, dtype=np.complex128)
    N = c.shape[-1] - 1
    X = np.zeros(c.shape[:-1] + (num_points // 2 + 1,), dtype=np.complex128)
    X[..., :N + 1] = c
    return scipy.fft.irfft(X, n=num_points, axis=-1, norm="forward",
                           workers=kernels.threads())


def conv_fft(a, b):
    """Galerkin-truncated convolution through a zero-padded real FFT."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    N = a.shape[-1] - 1
    P = padded_length(N)
    ua = to_grid(a, P)
    ub = ua if b is a else to_grid(b, P)
    p = scipy.fft.rfft(ua * ub, axis=-1, norm="forward", workers=kernels.threads())
    out = p[..., :N + 1].copy()
    out[..., 0] = out[..., 0].real
    return out


def conv_array(a, b, method="auto"):
    """Truncated convolution of coefficient arrays with matching trailing axis.

    ``method`` is ``"fft"``, ``"direct"`` or ``"auto"``; auto picks the
    compiled direct sum for small N and the padded FFT otherwise.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ConfigurationError(f"shape mismatch {a.shape} vs {b.shape}")
    N = a.shape[-1] - 1
    if method == "auto":
        rows = a.size // (N + 1)
        limit = kernels.DIRECT_MAX_N if rows == 1 else kernels.DIRECT_MAX_N_BATCH
        use_direct = kernels.BACKEND == "compiled" and N <= limit
        method = "direct" if use_direct else "fft"
    if method == "fft":
        return conv_fft(a, b)
    if method == "direct":
        flat_a = a.reshape(-1, N + 1)
        flat_b = b.reshape(-1, N + 1)
        out = kernels.conv_direct(flat_a, flat_b).reshape(a.shape)
        out[..., 0] = out[..., 0].real
        return out
    raise ConfigurationError(f"unknown convolution method {method!r}")


def convolve(v: ModeVector, w: ModeVector, method="fft") -> ModeVector:
    """p_n = sum over |k|, |n-k| <= N of v_k w_{n-k}, for |n| <= N."""
    _check_compatible(v, w)
    return ModeVector(v.L, conv_array(v.coeffs, w.coeffs, method))


# -- physical space ----------------------------------------------------------

def _synthesize_coeffs(c, L, num_points):
    N = c.size - 1
    if num_points < 2 * N + 1:
        raise ConfigurationError(
            f"num_points={num_points} aliases modes up to N={N}; need >= {2 * N + 1}")
    X = np.zeros(num_points, dtype=np.complex128)
    X[:N + 1] = c
    X[num_points - N:] = np.conj(c[:0:-1])
    z = scipy.fft.ifft(X, norm="forward")
    scale = max(1.0, float(np.sum(np.abs(c))))
    residue = float(np.max(np.abs(z.imag)))
    if residue > IMAG_TOL * scale:
        raise ArithmeticError(f"synthesis not real: max |Im| = {residue:.3e}")
    xs = L * np.arange(num_points) / num_points
    return FieldSamples(xs, z.real.copy())


def synthesize(v: ModeVector, num_points: int) -> FieldSamples:
    return _synthesize_coeffs(v.coeffs, v.L, num_points)


def derivative_coeffs(c, L):
    c = np.asarray(c, dtype=np.complex128)
    return 1j * wavenumbers(c.shape[-1] - 1, L) * c


def synthesize_derivative(v: ModeVector, num_points: int) -> FieldSamples:
    """Samples of u_x, the term-wise derivative of the truncated series."""
    return _synthesize_coeffs(derivative_coeffs(v.coeffs, v.L), v.L, num_points)
