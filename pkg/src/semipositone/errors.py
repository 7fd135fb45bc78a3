"""Exception hierarchy shared by all modules."""


class SemipositoneError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SemipositoneError, ValueError):
    """Invalid domain, weight, nonlinearity or solver parameters."""


class ContractViolation(SemipositoneError, ValueError):
    """An argument does not satisfy an operation's precondition."""


class DomainError(SemipositoneError, ValueError):
    """A nonlinearity was evaluated outside its domain."""


class ConvergenceError(SemipositoneError, RuntimeError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AdmissibilityError(SemipositoneError):
    """A positivity (cone) certificate failed for an auxiliary object.

    Raised when the weight appears to lie outside the range where the
    sub/supersolution construction applies.
    """

    def __init__(self, message, stage=None, margin=None):
        super().__init__(message)
        self.stage = stage
        self.margin = margin


class ConstructionError(SemipositoneError):
    """The supersolution scale search exceeded its cap."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class RangeError(SemipositoneError, ValueError):
    """A parameter lies outside the admissible range of a construction."""

    def __init__(self, message, bound):
        super().__init__(message)
        self.bound = bound


class BracketingError(SemipositoneError, ValueError):
    """The shooting bracket does not enclose a sign change."""


class DataError(SemipositoneError, ValueError):
    """Not enough usable records for a fit."""


class NotFoundError(SemipositoneError):
    """No validated parameter value was found in the scanned range."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or []
