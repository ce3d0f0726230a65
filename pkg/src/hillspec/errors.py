"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); numerical
failures derive from :class:`NumericalError` (CLI exit code 3).
"""


class HillSpecError(Exception):
    """Base class for all package errors."""


class InputError(HillSpecError, ValueError):
    pass


class NumericalError(HillSpecError, RuntimeError):
    #: name of the operation that failed, used in CLI diagnostics
    operation = "unknown"


class OddIndex(InputError):
    def __init__(self, k):
        super().__init__(f"Fourier index k={k} is odd; Q is pi-periodic so only even k are allowed")
        self.k = k


class ZeroIndexPresent(InputError):
    def __init__(self):
        super().__init__("Fourier index k=0 supplied; Q must have zero mean (put constants into C)")
        self.k = 0


class PotentialFileError(InputError):
    def __init__(self, message, k=None):
        if k is not None:
            message = f"{message} (offending k={k})"
        super().__init__(message)
        self.k = k


class CutoffTooSmall(InputError):
    pass


class StepFailure(NumericalError):
    operation = "integrate_fundamental"

    def __init__(self, x_reached, message="step size underflow"):
        super().__init__(f"{message} at x={x_reached!r}")
        self.x_reached = x_reached


class NoConvergence(NumericalError):
    operation = "root polish"

    def __init__(self, message, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


class InterlacingViolation(NumericalError):
    operation = "band_edges"


class EigensolverFailure(NumericalError):
    operation = "eigenvalues"


class NotConverged(NumericalError):
    operation = "converged_spectrum"

    def __init__(self, message, K=None, movement=None):
        super().__init__(message)
        self.K = K
        self.movement = movement


class DivergentEntry(NumericalError):
    operation = "kvk_matrix"


class PairingAmbiguity(NumericalError):
    operation = "gap_table"


class InsufficientData(NumericalError):
    operation = "decay_profile"
