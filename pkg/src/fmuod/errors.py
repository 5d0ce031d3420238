"""Exception types raised by the library."""


class FmuodError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCurve(FmuodError):
    """Functional data values are malformed (bad shape, NaN or infinity)."""


class InsufficientData(FmuodError):
    """Too few curves for the requested operation."""


class DegenerateReference(FmuodError):
    """The reference curve is constant, so shape and amplitude are undefined."""


class InvalidDirection(FmuodError):
    """A projection direction is malformed or has (near-)zero norm."""


class InvalidConfig(FmuodError):
    """Configuration values are inconsistent or out of range."""


class ParseError(FmuodError):
    """A data file could not be parsed; the message points at the offending line."""
