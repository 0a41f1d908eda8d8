"""Exception and warning types raised across the package."""


class SuperoscError(ValueError):
    """Base class for invalid-input and numeric failures."""


class QuadratureError(SuperoscError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    worst_index : int
        Flat index of the output component with the largest error ratio.
    estimate : complex
        Integral estimate for that component.
    error : float
        Error estimate for that component.
    """

    def __init__(self, message, worst_index=0, estimate=0.0, error=float("inf")):
        super().__init__(message)
        self.worst_index = worst_index
        self.estimate = estimate
        self.error = error


class SingularityError(SuperoscError):
    """Evaluation requested at a zero of the field (phase singularity)."""


class OrthogonalSelectionError(SuperoscError):
    """Pre- and post-selected states are orthogonal; the weak value diverges."""


class RankDeficientError(SuperoscError):
    """Linear constraints are dependent.

    Attributes
    ----------
    dependent : list of int
        Indices of the constraints that are linear combinations of the others.
    """

    def __init__(self, message, dependent=()):
        super().__init__(message)
        self.dependent = list(dependent)


class DuplicatePointsError(SuperoscError):
    """Interpolation nodes closer than the resolvable spacing."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class ConditioningWarning(UserWarning):
    """A linear system is worse conditioned than the configured threshold."""
