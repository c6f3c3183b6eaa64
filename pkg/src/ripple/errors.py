"""Exception hierarchy.

Every error carries a ``category`` string that the CLI writes into its
machine-readable error document.
"""


class RippleError(Exception):
    category = "error"


class ConfigurationError(RippleError, ValueError):
    """Mismatched dimensions, bad grid sizes, malformed configs."""

    category = "configuration"


class NoRealRoot(RippleError, ArithmeticError):
    """The zero-mode quadratic has a negative discriminant.

    ``t`` is the time sample at which it happened, when known.
    """

    category = "no_real_root"

    def __init__(self, message, s0=None, t=None):
        super().__init__(message)
        self.s0 = s0
        self.t = t


class GateViolation(RippleError):
    category = "gate_violation"


class NotConverged(RippleError):
    category = "not_converged"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConservationBreach(RippleError):
    category = "conservation_breach"

    def __init__(self, message, t=None, drift=None):
        super().__init__(message)
        self.t = t
        self.drift = drift
