"""Time stepping of the mode system with the mean mode held on its constraint.

Nonzero modes obey du_n/dt = -(i L / (2 pi n)) (u_n - 3 (u*u)_n). The mean
is never integrated: every right-hand-side evaluation first resolves it
from sum_{n != 0} |u_n|^2, and so does every accepted step.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import batch_records, relative_drift
from .errors import ConfigurationError, ConservationBreach, GateViolation
from .mode_space import ModeVector, conv_array, energies
from .picard import Trajectory, sup_h_distance
from .zero_mode import GATE, BranchSign, solve_zero_mode_array

log = logging.getLogger(__name__)

MAX_SAMPLES = 10_000


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_final: float
    branch: BranchSign = BranchSign.PLUS
    conservation_tol: float = 1e-6
    stride: int | None = None
    quad_points: int | None = None
    method: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "branch", BranchSign.parse(self.branch))
        if not (self.dt > 0 and self.t_final > 0):
            raise ConfigurationError("dt and t_final must be positive")
        if self.dt > self.t_final * (1 + 1e-12):
            raise ConfigurationError("dt must not exceed t_final")
        if not self.conservation_tol > 0:
            raise ConfigurationError("conservation_tol must be positive")
        if self.stride is not None and self.stride < 1:
            raise ConfigurationError("stride must be >= 1")


def _multiplier(N, L):
    m = np.zeros(N + 1, dtype=np.complex128)
    n = np.arange(1, N + 1)
    m[1:] = -1j * L / (2.0 * np.pi * n)
    return m


def resolve_mean(c, branch, t=None):
    """Copy of ``c`` with the mean set from the constraint."""
    c = np.array(c, dtype=np.complex128)
    _, s0 = energies(c)
    c[..., 0] = solve_zero_mode_array(s0, branch, t)
    return c


def rhs_array(c, mult, branch, method="auto", t=None):
    c = resolve_mean(c, branch, t)
    return mult * (c - 3.0 * conv_array(c, c, method))


def rhs(u: ModeVector, branch=BranchSign.PLUS, method="auto") -> ModeVector:
    """Time derivative of every mode; the mean's entry is zero."""
    branch = BranchSign.parse(branch)
    return ModeVector(u.L, rhs_array(u.coeffs, _multiplier(u.N, u.L), branch, method))


def rk4_array(c, dt, mult, branch, method="auto", t=None):
    k1 = rhs_array(c, mult, branch, method, t)
    k2 = rhs_array(c + 0.5 * dt * k1, mult, branch, method, t)
    k3 = rhs_array(c + 0.5 * dt * k2, mult, branch, method, t)
    k4 = rhs_array(c + dt * k3, mult, branch, method, t)
    out = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return resolve_mean(out, branch, t)


def step_rk4(u: ModeVector, dt, branch=BranchSign.PLUS, method="auto") -> ModeVector:
    """One classical RK4 step; the returned mean satisfies the constraint."""
    branch = BranchSign.parse(branch)
    return ModeVector(u.L, rk4_array(u.coeffs, dt, _multiplier(u.N, u.L), branch, method))


def _schedule(cfg):
    steps = max(1, math.ceil(cfg.t_final / cfg.dt - 1e-9))
    dt = cfg.t_final / steps
    stride = cfg.stride
    if stride is None:
        stride = max(1, math.ceil(steps / MAX_SAMPLES))
    # keep the emitted grid uniform and ending at t_final
    while steps % stride:
        stride += 1
    return steps, dt, stride


def integrate(phi: ModeVector, cfg: EvolutionConfig):
    """RK4 over [0, t_final]; returns ``(Trajectory, list of DiagnosticsRecord)``.

    The step is shortened, if needed, so that t_final is a whole number of
    steps. Raises ``ConservationBreach`` as soon as the relative drift of
    E1 exceeds ``cfg.conservation_tol``.
    """
    s2, _ = energies(phi.coeffs)
    if not float(s2) < GATE:
        raise GateViolation(f"sum n^2|phi_n|^2 = {float(s2):.17g} is not < 1/72")
    steps, dt, stride = _schedule(cfg)
    mult = _multiplier(phi.N, phi.L)
    c = resolve_mean(phi.coeffs, cfg.branch, 0.0)
    e1_ref = float(s2)
    samples = [c]
    times = [0.0]
    for j in range(1, steps + 1):
        t = j * dt
        c = rk4_array(c, dt, mult, cfg.branch, cfg.method, t)
        e1 = float(energies(c)[0])
        drift = abs(e1 - e1_ref) / e1_ref if e1_ref > 0 else abs(e1)
        if drift > cfg.conservation_tol:
            raise ConservationBreach(
                f"relative E1 drift {drift:.3e} exceeds {cfg.conservation_tol:.3e} at t = {t:.17g}",
                t=t, drift=drift)
        if j % stride == 0:
            samples.append(c)
            times.append(t)
    states = np.array(samples)
    traj = Trajectory(phi.L, np.array(times), states)
    records = batch_records(states, traj.times, phi.L, cfg.quad_points)
    log.debug("integrated %d steps, E1 drift %.3e", steps,
              relative_drift([r.E1 for r in records]))
    return traj, records


def cross_method_distance(picard: Trajectory, branch=BranchSign.PLUS, method="auto"):
    """sup-in-time H distance between a Picard trajectory and RK4 on its grid."""
    branch = BranchSign.parse(branch)
    mult = _multiplier(picard.N, picard.L)
    c = resolve_mean(picard.states[0], branch)
    out = [c]
    h = picard.spacing
    for _ in range(picard.M):
        c = rk4_array(c, h, mult, branch, method)
        out.append(c)
    return sup_h_distance(np.array(out), picard.states)
