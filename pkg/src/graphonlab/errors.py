"""Exception types shared across the package."""


class GraphonLabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(GraphonLabError, ValueError):
    """Invalid input: bad parameters, malformed data, violated preconditions."""


class BudgetError(GraphonLabError, RuntimeError):
    """A computation would exceed its elementary-operation budget."""
