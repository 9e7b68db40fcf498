"""Exception hierarchy shared by every module."""


class SubGaussError(Exception):
    """Base class for all errors raised by :mod:`subgauss`."""


class ParameterError(SubGaussError, ValueError):
    """A distribution or option parameter lies outside its domain."""


class SpecError(ParameterError):
    """A JSON distribution spec is malformed.

    ``path`` names the offending field, e.g. ``$.components[1].weight``.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DegenerateDistributionError(SubGaussError, ValueError):
    """The distribution has zero variance."""


class MomentRangeError(SubGaussError, OverflowError):
    """A requested moment does not fit in a double."""


class EvaluationError(SubGaussError, ArithmeticError):
    """A CGF, series or derivative evaluation failed to converge."""


class ConvergenceError(SubGaussError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class PreconditionError(SubGaussError, ValueError):
    """An operation was called on an input it does not support."""
