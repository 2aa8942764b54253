"""Exception types shared across the package."""


class MahlerError(Exception):
    """Base class for computational failures (CLI exit code 1)."""


class ReducibleError(MahlerError):
    pass


class UnsupportedDegreeError(MahlerError):
    pass


class InternalConsistencyError(MahlerError):
    pass


class CertificationError(MahlerError):
    """Root isolation could not certify its disks below the precision ceiling."""


class PairingUnavailableError(MahlerError):
    """Finite-place supports cannot be matched without splitting data."""


class ContextError(MahlerError):
    """Invalid or inconsistent Galois context data."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class NotASubfieldError(MahlerError):
    pass


class ReconstructionError(MahlerError):
    """Rational reconstruction of a numeric projection failed its residual check."""
