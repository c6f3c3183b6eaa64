"""Spectral solver for the periodic short-wave equation u_tx = u - 3u^2."""

__version__ = "0.1.0"

from .errors import (ConfigurationError, ConservationBreach, GateViolation, NoRealRoot,
                     NotConverged, RippleError)
from .kernels import BACKEND
from .mode_space import (FieldSamples, ModeVector, convolve, h_norm, synthesize,
                         synthesize_derivative, tail_energy)
from .zero_mode import (AdmissibilityReport, BranchSign, admissibility, build_initial,
                        solve_zero_mode)
from .picard import (FixedPointReport, SolveReport, Trajectory, fixed_point,
                     integral_residual, lipschitz_estimate, picard_apply, solve)
from .evolution import EvolutionConfig, integrate, rhs, step_rk4
from .diagnostics import DiagnosticsRecord, drift_report, record

__all__ = [
    "BACKEND", "AdmissibilityReport", "BranchSign", "ConfigurationError",
    "ConservationBreach", "DiagnosticsRecord", "EvolutionConfig", "FieldSamples",
    "FixedPointReport", "GateViolation", "ModeVector", "NoRealRoot", "NotConverged",
    "RippleError", "SolveReport", "Trajectory", "admissibility", "build_initial",
    "convolve", "drift_report", "fixed_point", "h_norm", "integral_residual",
    "integrate", "lipschitz_estimate", "picard_apply", "record", "rhs", "solve",
    "solve_zero_mode", "step_rk4", "synthesize", "synthesize_derivative", "tail_energy",
]
