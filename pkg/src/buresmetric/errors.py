"""Exception hierarchy shared by all modules."""


class BuresError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BuresError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class ShapeError(BuresError, ValueError):
    """Matrix dimensions or ensemble sizes do not match."""


class SizeError(BuresError, ValueError):
    """A requested dense matrix would exceed the configured dimension cap."""


class NotHermitianError(BuresError, ValueError):
    pass


class NotPSDError(BuresError, ValueError):
    """A matrix has an eigenvalue below the clamping threshold."""


class ConvergenceError(BuresError, RuntimeError):
    """An eigensolver failed to converge.

    The matrix dimension is kept on the exception as ``dim``.
    """

    def __init__(self, message, dim=None):
        super().__init__(message)
        self.dim = dim


class BoundaryError(BuresError, ValueError):
    """Metric requested at (or numerically too close to) a pure/boundary state."""


class RankDeficiencyError(BuresError, ArithmeticError):
    pass


class AccuracyError(BuresError, ArithmeticError):
    """A numerical scheme could not reach its accuracy target."""


class PreconditionError(BuresError, ValueError):
    pass


class IntegrabilityError(BuresError, ArithmeticError):
    pass


class InvariantViolation(BuresError, AssertionError):
    """A mathematical invariant failed beyond its tolerance."""
