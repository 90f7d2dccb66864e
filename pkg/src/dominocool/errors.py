"""Exception hierarchy shared across the package."""


class DominoError(Exception):
    """Base class for all package errors."""


class ConfigError(DominoError):
    """Invalid, inconsistent or unparseable configuration input."""


class DomainError(DominoError):
    """A closed-form expression was evaluated outside its domain."""


class StabilityError(DominoError):
    """The drift dynamics are not asymptotically stable."""


class NumericalError(DominoError):
    """A numerical routine failed to reach its accuracy contract."""


class PoleError(DominoError):
    """The frequency-domain system is singular at the probe frequency."""


class BracketError(DominoError):
    """Root bracketing failed: no sign change over the given interval."""


class OptimizationError(DominoError):
    """The optimizer could not produce a single stable evaluation."""


class UnsupportedMode(DominoError):
    """Requested operating mode is not supported by this solver."""
