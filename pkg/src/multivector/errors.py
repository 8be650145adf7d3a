"""Exception types shared across the package."""


class MultivectorError(Exception):
    """Base class for all errors raised by this package."""


class UnknownCellError(MultivectorError, KeyError):
    """A cell id or key does not belong to the complex."""


class NotProperError(MultivectorError, ValueError):
    """A subset was required to be proper (its mouth closed) but is not."""


class PreconditionError(MultivectorError, ValueError):
    """An operation was called on inputs outside its domain."""


class InvalidFieldError(MultivectorError, ValueError):
    """A partition or theta map does not define a multivector field.

    ``violations`` lists ``(kind, cells)`` tuples, one per offending condition.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class PathError(MultivectorError, ValueError):
    """A sequence of cells is not a path in the dynamics graph."""


class InternalConsistencyError(MultivectorError, AssertionError):
    """An identity guaranteed by the theory failed; this indicates a bug."""
