class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds one of the configured size caps."""
