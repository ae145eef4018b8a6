"""Exception hierarchy for qlelab.

Every failure mode that callers are expected to handle gets its own class,
so the CLI can map them to stable exit codes (config -> 2, numerical
domain -> 3, no convergence -> 4).
"""


class QlelabError(Exception):
    """Base class for all qlelab errors."""


class ConfigError(QlelabError):
    """Invalid configuration file, CLI flags, or schema violation."""


class InvalidArgumentError(QlelabError, ValueError):
    """An argument violates a documented precondition."""


class GridMismatchError(InvalidArgumentError):
    """Two fields that must share a grid do not."""


class SingularMetricError(QlelabError):
    """A metric is degenerate (non positive definite) at some node."""


class NotConvexError(QlelabError):
    """Gauss curvature is not positive everywhere, but positivity is required."""


class NotSpacelikeError(QlelabError):
    """The mean curvature vector fails to be spacelike (|tr p| >= k somewhere)."""


class SingularPointError(QlelabError):
    """Evaluation requested at a singular point of an analytic family (r = 0)."""


class NumericalDomainError(QlelabError):
    """A quantity left its admissible numerical domain (e.g. sqrt of a
    significantly negative number), indicating invalid input data."""


class ConvergenceError(QlelabError):
    """An iterative solver failed to reach its tolerance.

    Attributes carry the best iterate information so callers can inspect
    partial results.
    """

    def __init__(self, message, best_residual=None, iterations=None, best=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations
        self.best = best
