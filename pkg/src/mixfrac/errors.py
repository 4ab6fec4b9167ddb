"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A precondition on an argument is violated."""


class SingularityError(InvalidArgument):
    """A singular test function was evaluated at its singular point."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class InvalidWeight(InvalidArgument):
    """A weight is not strictly positive."""
