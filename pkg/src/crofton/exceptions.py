"""Exception types shared across the package."""


class DomainError(ValueError):
    """An index or dimension lies outside the admissible range of an operation."""


class DegenerateInputError(ValueError):
    """Input vectors are (numerically) linearly dependent."""


class NotAvailableError(NotImplementedError):
    """A functional has no implementation for the requested body or index."""
