"""Exception types shared by every module."""


class PreconditionError(ValueError):
    """An input violates the documented contract of an operation."""


class UniformityError(PreconditionError):
    """Two objects that must share a uniformity do not."""


class BudgetExceeded(RuntimeError):
    """The requested computation is larger than the configured budget."""
