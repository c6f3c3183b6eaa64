"""The mean-mode constraint u_0 - 3 u_0^2 = 3 S0 and admissible initial data."""
import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GateViolation, NoRealRoot
from .mode_space import ModeVector, energies, tail_energy

GATE = 1.0 / 72.0
FOLD = 1.0 / 36.0


class BranchSign(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"branch must be 'plus' or 'minus', got {value!r}") from None


@dataclass(frozen=True)
class AdmissibilityReport:
    S2: float
    S0: float
    gate_72: bool
    gate_36: bool
    zero_mean_residual: float


def solve_zero_mode(s0, branch=BranchSign.PLUS, t=None):
    """Root of r - 3 r^2 = 3 S0 on the requested branch.

    The minus root is evaluated in rationalized form, 6 S0 / (1 + sqrt(D)),
    so it keeps full relative accuracy for small S0.

    Raises
    ------
    NoRealRoot
        If ``s0 > 1/36``.
    """
    branch = BranchSign.parse(branch)
    s0 = float(s0)
    if not s0 >= 0.0:
        raise ConfigurationError(f"S0 must be nonnegative, got {s0}")
    if s0 > FOLD:
        raise NoRealRoot(f"S0 = {s0:.17g} exceeds 1/36; no real mean mode", s0=s0, t=t)
    disc = max(1.0 - 36.0 * s0, 0.0)
    root = np.sqrt(disc)
    if branch is BranchSign.PLUS:
        return (1.0 + root) / 6.0
    return 6.0 * s0 / (1.0 + root)


def solve_zero_mode_array(s0, branch=BranchSign.PLUS, times=None):
    """Vectorized ``solve_zero_mode``; ``times`` labels the failing sample."""
    branch = BranchSign.parse(branch)
    s0 = np.asarray(s0, dtype=np.float64)
    bad = np.flatnonzero(s0.reshape(-1) > FOLD)
    if bad.size:
        i = int(bad[0])
        t = None if times is None else float(np.asarray(times).reshape(-1)[i])
        where = "" if t is None else f" at t = {t:.17g}"
        raise NoRealRoot(f"S0 exceeds 1/36{where}; horizon too long",
                         s0=float(s0.reshape(-1)[i]), t=t)
    root = np.sqrt(np.maximum(1.0 - 36.0 * s0, 0.0))
    if branch is BranchSign.PLUS:
        return (1.0 + root) / 6.0
    return 6.0 * s0 / (1.0 + root)


def constraint_residual(c):
    """|c_0 - 3 c_0^2 - 3 S0|, batched over leading axes."""
    c = np.asarray(c, dtype=np.complex128)
    _, s0 = energies(c)
    c0 = c[..., 0].real
    return np.abs(c0 - 3.0 * c0 * c0 - 3.0 * s0)


def build_initial(modes: ModeVector, branch=BranchSign.PLUS) -> ModeVector:
    """Fill in the mean of ``modes`` so the zero-mean relation holds.

    The incoming mean is ignored. Requires sum n^2 |phi_n|^2 < 1/72.
    """
    s2, s0 = tail_energy(modes)
    if not s2 < GATE:
        raise GateViolation(f"sum n^2|phi_n|^2 = {s2:.17g} is not < 1/72")
    assert s0 <= FOLD
    return modes.with_mean(solve_zero_mode(s0, branch))


def admissibility(v: ModeVector) -> AdmissibilityReport:
    s2, s0 = tail_energy(v)
    return AdmissibilityReport(
        S2=s2,
        S0=s0,
        gate_72=bool(s2 < GATE),
        gate_36=bool(s0 <= FOLD),
        zero_mean_residual=float(constraint_residual(v.coeffs)),
    )
