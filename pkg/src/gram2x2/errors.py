"""Exception hierarchy shared by all modules."""


class Gram2x2Error(Exception):
    """Base class for every error raised by this package."""


class NonPositiveVariance(Gram2x2Error, ValueError):
    pass


class NotPSD(Gram2x2Error, ValueError):
    pass


class DomainError(Gram2x2Error, ValueError):
    pass


class DegenerateParameters(Gram2x2Error, ValueError):
    """Closed forms that need distinct variances were given coinciding ones.

    Use :func:`gram2x2.dist.perturb_distinct` to nudge the profile apart.
    """


class InvalidEigenOrder(Gram2x2Error, ValueError):
    pass


class SingularChannel(Gram2x2Error, ArithmeticError):
    pass


class EmptySample(Gram2x2Error, ValueError):
    pass


class NoConvergence(Gram2x2Error, ArithmeticError):
    pass


class QuadratureNoConvergence(NoConvergence):
    """Raised when node doubling stops before reaching the tolerance.

    ``previous`` and ``last`` hold the final two estimates.
    """

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last
