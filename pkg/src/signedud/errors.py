"""Exception hierarchy shared by all modules."""


class SignedUDError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SignedUDError, ValueError):
    """An input violates a documented precondition."""


class DegenerateMeasureError(ValidationError):
    """A measure (or BV function) has zero total variation."""


class OracleInconsistencyError(SignedUDError):
    """A BV oracle returned samples that cannot come from a BV function."""


class SourceExhaustedError(SignedUDError):
    """A source sequence ended although sources must be unbounded."""


class QuadratureError(SignedUDError):
    """Adaptive quadrature failed to reach the requested tolerance."""
