"""Invariant monitors in spectral and physical space.

``ux_l2_*`` fields hold the squared norm, the integral of u_x^2 over one
period: spectrally L (2 pi / L)^2 E1, physically by the periodic
trapezoid rule, which is exact for the degree-2N integrand when the grid
has at least 4N+1 points.
"""
import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .mode_space import ModeVector, derivative_coeffs, energies, h_norm_array, to_grid

CSV_FIELDS = ("t", "h_norm", "E1", "constraint_residual", "zero_mean_residual",
              "ux_l2_spectral", "ux_l2_physical")


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    h_norm: float
    E1: float
    constraint_residual: float
    zero_mean_residual_physical: float
    ux_l2_spectral: float
    ux_l2_physical: float

    def row(self):
        return astuple(self)


@dataclass(frozen=True)
class DriftSummary:
    max_e1_drift: float
    max_constraint_residual: float
    max_zero_mean_residual: float
    e1_reference: float


def default_quad_points(N):
    return 4 * N + 1


def batch_records(states, times, L, quad_points=None):
    """Diagnostics for each row of ``states`` (shape (S, N+1))."""
    states = np.atleast_2d(np.asarray(states, dtype=np.complex128))
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    N = states.shape[1] - 1
    P = default_quad_points(N) if quad_points is None else int(quad_points)
    if P < 4 * N + 1:
        raise ValueError(f"quad_points must be >= 4N+1 = {4 * N + 1}")
    e1, s0 = energies(states)
    c0 = states[:, 0].real
    constraint = np.abs(c0 - 3.0 * c0 * c0 - 3.0 * s0)
    u = to_grid(states, P)
    ux = to_grid(derivative_coeffs(states, L), P)
    zero_mean = np.abs(np.mean(u - 3.0 * u * u, axis=1))
    k1 = 2.0 * np.pi / L
    ux_spec = L * k1 * k1 * e1
    ux_phys = L * np.mean(ux * ux, axis=1)
    hn = h_norm_array(states)
    return [DiagnosticsRecord(float(t), float(a), float(b), float(c), float(d), float(e), float(f))
            for t, a, b, c, d, e, f in zip(times, hn, e1, constraint, zero_mean, ux_spec, ux_phys)]


def record(u: ModeVector, t, quad_points=None) -> DiagnosticsRecord:
    return batch_records(u.coeffs[None, :], [t], u.L, quad_points)[0]


def relative_drift(values, reference=None):
    values = np.asarray(values, dtype=np.float64)
    ref = values[0] if reference is None else reference
    dev = np.max(np.abs(values - ref))
    return float(dev / abs(ref)) if ref != 0 else float(dev)


def drift_report(records) -> DriftSummary:
    """Max relative E1 drift (from the first record) and max residuals."""
    records = list(records)
    if len(records) < 2:
        raise ValueError("drift_report needs at least two records")
    e1 = [r.E1 for r in records]
    return DriftSummary(
        max_e1_drift=relative_drift(e1),
        max_constraint_residual=max(r.constraint_residual for r in records),
        max_zero_mean_residual=max(r.zero_mean_residual_physical for r in records),
        e1_reference=e1[0],
    )


def is_finite(rec: DiagnosticsRecord) -> bool:
    return all(math.isfinite(getattr(rec, f.name)) for f in fields(rec))
