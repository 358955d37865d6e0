"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """Raised when an input value or file violates a documented precondition."""
