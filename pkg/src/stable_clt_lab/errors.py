"""Exception types shared by all modules."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """Configuration or object failed validation before any computation."""


class NumericError(RuntimeError):
    """A numerical procedure failed to converge or lost accuracy.

    ``diagnostics`` carries whatever context the raising routine had
    (node index, time, last increments, ...).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
