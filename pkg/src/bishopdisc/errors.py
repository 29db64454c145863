"""Exception types shared across the package."""


class BishopDiscError(Exception):
    """Base class for all library errors."""


class StructureError(BishopDiscError):
    """An almost complex structure violates one of its invariants."""


class ManifoldError(BishopDiscError):
    """A submanifold descriptor is inconsistent or a point is off it."""


class DomainError(BishopDiscError):
    """A point or a disc leaves the domain on which a field is defined."""


class ConvergenceError(BishopDiscError):
    """An iteration failed to converge.

    Carries the last measured residual so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class RankGapError(BishopDiscError):
    """No clear singular-value gap; rank decision would be arbitrary.

    The singular values are attached for inspection.
    """

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values
