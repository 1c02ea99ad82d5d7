"""Exception types shared across the package."""


class InvalidCoefficientError(ValueError):
    """A coefficient function violates a sign/positivity requirement."""


class FactorizationError(RuntimeError):
    """A direct factorization failed; message names the offending operator."""
