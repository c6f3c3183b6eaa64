"""Picard operator on time-sampled trajectories and its fixed point.

For n != 0 the operator maps a trajectory v to

    f_n(v)(t) = phi_n - (i L / (2 pi n)) * int_0^t (v_n - 3 (v*v)_n) ds

and sets f_0(v)(t) from the mean-mode constraint applied to the freshly
computed nonzero modes. Time integrals use the cumulative composite
trapezoid rule on a uniform grid; sup-in-time norms are maxima over the
grid samples.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import ConfigurationError, GateViolation, NoRealRoot, NotConverged
from .mode_space import ModeVector, conv_array, energies, h_norm_array
from .zero_mode import GATE, BranchSign, solve_zero_mode_array

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
MAX_HALVINGS = 20


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Mode vectors sampled on a uniform grid ``times[0] < ... < times[M]``."""

    L: float
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64).reshape(-1)
        states = np.array(self.states, dtype=np.complex128)
        if states.ndim != 2 or states.shape[0] != times.size:
            raise ConfigurationError("states must have shape (len(times), N+1)")
        if times.size < 2:
            raise ConfigurationError("a trajectory needs at least two samples")
        if states.shape[1] < 2:
            raise ConfigurationError("truncation order N must be >= 1")
        steps = np.diff(times)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(steps.max(), 1.0):
            raise ConfigurationError("time grid must be increasing and uniform")
        if not np.all(np.isfinite(states)):
            raise ConfigurationError("trajectory states must be finite")
        states[:, 0] = states[:, 0].real
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def M(self) -> int:
        return self.times.size - 1

    @property
    def N(self) -> int:
        return self.states.shape[1] - 1

    @property
    def T(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def spacing(self) -> float:
        return self.T / self.M

    def state(self, j) -> ModeVector:
        return ModeVector(self.L, self.states[j])

    @classmethod
    def constant(cls, phi: ModeVector, T, M, t0=0.0):
        times = t0 + T * np.arange(M + 1) / M
        return cls(phi.L, times, np.broadcast_to(phi.coeffs, (M + 1, phi.N + 1)))


@dataclass
class FixedPointReport:
    iterations: int = 0
    final_update_norm: float = math.inf
    update_norms: list = field(default_factory=list)
    contraction_ratios: list = field(default_factory=list)
    integral_residual: float = math.nan
    converged: bool = False

    def limiting_ratio(self, last=3):
        """Geometric mean of the last few finite contraction ratios."""
        r = [x for x in self.contraction_ratios if np.isfinite(x) and x > 0][-last:]
        return float(np.exp(np.mean(np.log(r)))) if r else math.nan


@dataclass
class SolveReport:
    trajectory: Trajectory
    fixed_point: FixedPointReport
    horizon: float
    requested_horizon: float
    halvings: int
    windows: int = 1


def sup_h_distance(a, b):
    """max over samples of the H-norm of a - b (arrays of shape (M+1, N+1))."""
    return float(np.max(h_norm_array(np.asarray(a) - np.asarray(b))))


def _check_inputs(phi, L, N):
    if phi.L != L or phi.N != N:
        raise ConfigurationError("initial datum and trajectory disagree on L or N")
    s2, _ = energies(phi.coeffs)
    if not float(s2) < GATE:
        raise GateViolation(f"sum n^2|phi_n|^2 = {float(s2):.17g} is not < 1/72")


def _integrate(g, h, quadrature):
    if quadrature == "trapezoid":
        return cumulative_trapezoid(g, dx=h, axis=0, initial=0)
    if quadrature == "simpson":
        # cumulative_simpson drops imaginary parts of complex input
        re = cumulative_simpson(g.real, dx=h, axis=0, initial=0)
        im = cumulative_simpson(g.imag, dx=h, axis=0, initial=0)
        return re + 1j * im
    raise ConfigurationError(f"unknown quadrature {quadrature!r}")


def apply_array(states, times, phi_c, L, branch, method="auto", quadrature="trapezoid"):
    """Array form of the Picard operator; returns the new states array."""
    states = np.asarray(states, dtype=np.complex128)
    N = states.shape[1] - 1
    g = states - 3.0 * conv_array(states, states, method)
    h = (times[-1] - times[0]) / (len(times) - 1)
    integral = _integrate(g, h, quadrature)
    n = np.arange(1, N + 1)
    out = np.empty_like(states)
    out[:, 1:] = phi_c[1:] - (1j * L / (2.0 * np.pi * n)) * integral[:, 1:]
    _, s0 = energies(out)
    out[:, 0] = solve_zero_mode_array(s0, branch, times)
    return out


def picard_apply(v: Trajectory, phi: ModeVector, branch=BranchSign.PLUS,
                 method="auto", quadrature="trapezoid") -> Trajectory:
    """One application of the Picard operator to ``v``.

    Raises ``NoRealRoot`` (with the offending time) when the nonzero modes
    of f(v) leave the ball sum |f_n|^2 <= 1/36 at some sample.
    """
    _check_inputs(phi, v.L, v.N)
    branch = BranchSign.parse(branch)
    new = apply_array(v.states, v.times - v.times[0], phi.coeffs, v.L, branch,
                      method, quadrature)
    return Trajectory(v.L, v.times, new)


def integral_residual(u: Trajectory, phi: ModeVector, branch=BranchSign.PLUS,
                      method="auto", quadrature="trapezoid") -> float:
    """sup over samples of |u(t) - f(u)(t)| in H.

    ``quadrature="simpson"`` evaluates the time integral with cumulative
    Simpson instead of the trapezoid used by the operator, which measures
    how far a discrete fixed point is from solving the exact integral
    equation.
    """
    fu = picard_apply(u, phi, branch, method, quadrature)
    return sup_h_distance(u.states, fu.states)


def fixed_point(phi: ModeVector, T, M, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                branch=BranchSign.PLUS, method="auto", t0=0.0):
    """Iterate u <- f(u) from the constant trajectory Phi until updates <= tol.

    Returns ``(trajectory, FixedPointReport)``. Raises ``NotConverged``
    (carrying the partial report) after ``max_iter`` applications.
    """
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    if not T > 0 or int(M) < 1:
        raise ConfigurationError("need T > 0 and M >= 1")
    branch = BranchSign.parse(branch)
    M = int(M)
    _check_inputs(phi, phi.L, phi.N)
    times = t0 + T * np.arange(M + 1) / M
    rel = times - t0
    phi_c = phi.coeffs
    u = np.broadcast_to(phi_c, (M + 1, phi.N + 1)).copy()
    report = FixedPointReport()
    prev = None
    for k in range(1, max_iter + 1):
        new = apply_array(u, rel, phi_c, phi.L, branch, method)
        d = sup_h_distance(new, u)
        report.iterations = k
        report.update_norms.append(d)
        report.final_update_norm = d
        if prev is not None and prev > 0:
            report.contraction_ratios.append(d / prev)
        prev = d
        u = new
        if not np.isfinite(d):
            break
        if d <= tol:
            report.converged = True
            break
    if not report.converged:
        raise NotConverged(
            f"no fixed point after {report.iterations} iterations "
            f"(last update {report.final_update_norm:.3e}) at T = {T}", report=report)
    check = apply_array(u, rel, phi_c, phi.L, branch, method)
    report.integral_residual = sup_h_distance(u, check)
    log.debug("fixed point T=%g M=%d: %d iterations, residual %.3e",
              T, M, report.iterations, report.integral_residual)
    return Trajectory(phi.L, times, u), report


def solve(phi: ModeVector, T, M, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
          branch=BranchSign.PLUS, method="auto", max_halvings=MAX_HALVINGS, t0=0.0):
    """Local solve with horizon adaptation.

    Starts from horizon ``T``; on ``NotConverged`` or ``NoRealRoot`` the
    horizon is halved (``M`` fixed) up to ``max_halvings`` times.
    """
    horizon = float(T)
    for halvings in range(max_halvings + 1):
        try:
            traj, report = fixed_point(phi, horizon, M, tol, max_iter, branch, method, t0)
        except (NotConverged, NoRealRoot) as exc:
            if halvings == max_halvings:
                raise
            log.info("horizon %g rejected (%s); halving", horizon, type(exc).__name__)
            horizon /= 2.0
            continue
        return SolveReport(traj, report, horizon, float(T), halvings)
    raise AssertionError("unreachable")


def continue_solution(phi: ModeVector, t_final, M, tol=DEFAULT_TOL,
                      max_iter=DEFAULT_MAX_ITER, branch=BranchSign.PLUS, method="auto"):
    """Chain local solves over [0, t_final] on a uniform grid.

    The first window fixes an accepted horizon; ``t_final`` is then split
    into equal windows no longer than it, each restarted from the last
    state of the previous one. The last window's report is returned.
    """
    first = solve(phi, t_final, M, tol, max_iter, branch, method)
    if first.horizon >= t_final:
        return first
    windows = math.ceil(t_final / first.horizon - 1e-12)
    width = t_final / windows
    times = [np.zeros(1)]
    states = [phi.coeffs[None, :]]
    start = phi
    report = None
    for w in range(windows):
        traj, report = fixed_point(start, width, M, tol, max_iter, branch, method,
                                   t0=w * width)
        times.append(traj.times[1:])
        states.append(traj.states[1:])
        start = traj.state(-1)
    full = Trajectory(phi.L, np.concatenate(times), np.concatenate(states))
    return SolveReport(full, report, width, float(t_final), first.halvings, windows)


def lipschitz_estimate(u: Trajectory) -> float:
    """max over adjacent samples of |u(t_{j+1}) - u(t_j)|_H / spacing."""
    if u.M < 1:
        raise ConfigurationError("need at least two samples")
    jumps = h_norm_array(np.diff(u.states, axis=0))
    return float(np.max(jumps) / u.spacing)
