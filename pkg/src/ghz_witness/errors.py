"""Exception types raised across the package."""


class WitnessError(Exception):
    """Base class for all package errors."""


class DimensionError(WitnessError, ValueError):
    """Operands act on different numbers of qubits."""


class ModelError(WitnessError, ValueError):
    """A stabilizer model is malformed (non-commuting, dependent, non-Hermitian...)."""


class UnsupportedFrameError(WitnessError):
    """The requested backend/frame combination has no evaluation path."""


class CapExceededError(WitnessError):
    """A dense computation was requested above the configured qubit cap."""


class NoRootError(WitnessError, ValueError):
    """A threshold cannot be reached by a monotone closed form."""
