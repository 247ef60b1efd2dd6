"""Exception types shared across the package."""


class TdhfbError(Exception):
    """Base class for all package errors."""


class ConfigError(TdhfbError):
    """Invalid run configuration (bad file, unknown key, out-of-range value)."""


class GridMismatchError(TdhfbError):
    """Operands live on different grids."""


class NumericDomainError(TdhfbError):
    """A symbol or operand produced non-finite values."""


class SymmetryError(TdhfbError):
    """A kernel violated its declared symmetry beyond tolerance."""


class DomainTooSmallError(TdhfbError):
    """The periodic box cannot resolve the requested profile widths."""


class NumericalBlowupError(TdhfbError):
    """Time integration produced non-finite values.

    Carries the time at which the failure was detected.
    """

    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(message or f"non-finite state at t={t:.6g}")


class StiffnessError(TdhfbError):
    """Adaptive step size underflowed the configured minimum."""


class TruncationError(TdhfbError):
    """Fock-space cutoff too small for the requested state."""


class FitError(TdhfbError):
    """Growth-exponent fit could not be performed."""
