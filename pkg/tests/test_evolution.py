import math

import numpy as np
import pytest

from ripple.errors import ConfigurationError, ConservationBreach, GateViolation, NoRealRoot
from ripple.evolution import (EvolutionConfig, cross_method_distance, integrate, rhs,
                              step_rk4)
from ripple.mode_space import ModeVector, h_norm, tail_energy
from ripple.picard import fixed_point, sup_h_distance
from ripple.zero_mode import BranchSign, build_initial, constraint_residual

from conftest import TWO_PI, naive_convolution, random_admissible


def test_rhs_equilibrium_is_zero():
    d = rhs(ModeVector.zeros(TWO_PI, 8))
    assert np.all(np.abs(d.coeffs) <= 1e-16)


def test_rhs_single_mode_hand_expansion():
    eps = 0.03
    u0 = (1 + math.sqrt(1 - 72 * eps ** 2)) / 6
    d = rhs(ModeVector(TWO_PI, [0.0, eps]))
    assert d.coeffs[1] == pytest.approx(-1j * (eps - 6 * u0 * eps), rel=1e-14)
    # same value from the direct-sum oracle on the resolved state
    c = np.array([u0, eps], dtype=complex)
    oracle = -1j * (c[1] - 3 * naive_convolution(c, c)[1])
    assert d.coeffs[1] == pytest.approx(oracle, rel=1e-14)
    assert d.coeffs[0] == 0


def test_rhs_general_L_and_minus_branch(rng):
    phi = random_admissible(rng, 6, L=3.7)
    d = rhs(phi, BranchSign.MINUS).coeffs
    s0 = tail_energy(phi)[1]
    u0 = (1 - math.sqrt(1 - 36 * s0)) / 6
    c = phi.coeffs.copy()
    c[0] = u0
    conv = naive_convolution(c, c)
    n = np.arange(1, 7)
    expect = -1j * 3.7 / (2 * np.pi * n) * (c[1:] - 3 * conv[1:])
    np.testing.assert_allclose(d[1:], expect, atol=1e-16)


def test_rhs_raises_outside_ball():
    with pytest.raises(NoRealRoot):
        rhs(ModeVector(TWO_PI, [0.0, 0.2]))


def test_step_equilibrium_unchanged():
    phi = build_initial(ModeVector.zeros(TWO_PI, 8))
    assert h_norm(step_rk4(phi, 0.1) - phi) <= 1e-14


def test_step_conserves_e1(standard_datum):
    phi = build_initial(ModeVector.from_modes(TWO_PI, 16, {1: 0.05}))
    e0 = tail_energy(phi)[0]
    e1 = tail_energy(step_rk4(phi, 1e-3))[0]
    assert abs(e1 - e0) / e0 <= 1e-12


def test_step_restores_constraint(rng):
    phi = random_admissible(rng, 12)
    after = step_rk4(phi, 0.01)
    assert constraint_residual(after.coeffs) <= 1e-15


def test_step_local_error_order():
    # L = 20 pi speeds the dynamics up tenfold so the local error clears roundoff
    phi = build_initial(ModeVector.from_modes(20 * math.pi, 16, {1: 0.05, 2: 0.01j}))
    dts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
    errs = [h_norm(step_rk4(phi, dt) - step_rk4(step_rk4(phi, dt / 2), dt / 2)) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 5) <= 0.3


def test_integrate_equilibrium():
    phi = build_initial(ModeVector.zeros(TWO_PI, 8))
    traj, recs = integrate(phi, EvolutionConfig(0.1, 5.0))
    assert sup_h_distance(traj.states, np.tile(phi.coeffs, (traj.M + 1, 1))) <= 1e-14
    assert all(r.E1 == 0 and r.constraint_residual <= 1e-14 for r in recs)


def test_integrate_schedule_and_stride(standard_datum):
    traj, recs = integrate(standard_datum, EvolutionConfig(0.03, 0.1))
    assert traj.M == 4 and traj.times[-1] == pytest.approx(0.1)
    traj, _ = integrate(standard_datum, EvolutionConfig(0.01, 1.0, stride=10))
    assert traj.M == 10
    assert len(recs) == 5


def test_integrate_rejects_gate():
    with pytest.raises(GateViolation):
        integrate(ModeVector.from_modes(TWO_PI, 4, {1: 1 / 12}, mean=0.28),
                  EvolutionConfig(0.1, 1.0))


def test_conservation_breach_detected(standard_datum):
    with pytest.raises(ConservationBreach) as err:
        integrate(standard_datum, EvolutionConfig(0.5, 10.0, conservation_tol=1e-14))
    assert err.value.t is not None


def test_config_validation():
    with pytest.raises(ConfigurationError):
        EvolutionConfig(0.0, 1.0)
    with pytest.raises(ConfigurationError):
        EvolutionConfig(2.0, 1.0)
    with pytest.raises(ConfigurationError):
        EvolutionConfig(0.1, 1.0, branch="sideways")


def test_agrees_with_picard(standard_datum):
    u, _ = fixed_point(standard_datum, 0.1, 100)
    assert cross_method_distance(u) <= 1e-6
    traj, _ = integrate(standard_datum, EvolutionConfig(1e-3, 0.1))
    assert sup_h_distance(traj.states, u.states) <= 1e-6


def test_truncation_consistency():
    phi16 = build_initial(ModeVector.from_modes(TWO_PI, 16, {1: 0.05}))
    phi32 = build_initial(ModeVector.from_modes(TWO_PI, 32, {1: 0.05}))
    a, _ = integrate(phi16, EvolutionConfig(1e-2, 1.0))
    b, _ = integrate(phi32, EvolutionConfig(1e-2, 1.0))
    diff = np.zeros(33, dtype=complex)
    diff[:17] = b.states[-1][:17] - a.states[-1]
    diff[17:] = b.states[-1][17:]
    assert h_norm(ModeVector(TWO_PI, diff)) < 1e-8


def test_minus_branch_runs(standard_datum):
    phi = build_initial(ModeVector.from_modes(TWO_PI, 16, {1: 0.05}), BranchSign.MINUS)
    traj, recs = integrate(phi, EvolutionConfig(1e-2, 1.0, branch="minus"))
    assert max(r.constraint_residual for r in recs) <= 1e-14
    assert traj.states[-1, 0].real < 1 / 6
