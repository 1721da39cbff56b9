"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when an argument violates a documented precondition."""


class RankTooHigh(InvalidInput):
    """Requested truncation rank exceeds the numerically available rank."""


class ParseError(ValueError):
    """Raised when a matrix file is malformed."""


class IntegrationOverflow(RuntimeError):
    """Raised when a numerical integration produces non-finite values."""
