"""Exception hierarchy. ``exit_code`` is what the CLI returns for each class."""


class MixedPowersError(Exception):
    exit_code = 1


class ConstraintViolation(MixedPowersError, ValueError):
    """A factor breaks hypothesis H1 (nonzero at the origin) or H2 (non-constant)."""

    exit_code = 2

    def __init__(self, message, factor=None, hypothesis=None):
        super().__init__(message)
        self.factor = factor
        self.hypothesis = hypothesis


class DomainError(MixedPowersError, ValueError):
    exit_code = 3


class PoleError(DomainError):
    pass


class PoleOnContour(DomainError):
    pass


class NoSolution(DomainError):
    pass


class NoCriticalPoint(NoSolution):
    pass


class BadEpsilon(DomainError):
    pass


class NoValidEpsilon(DomainError):
    pass


class RegimeError(DomainError):
    pass


class NonConvergence(MixedPowersError):
    exit_code = 3

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class ConvergenceError(NonConvergence):
    pass


class CoalescenceError(MixedPowersError):
    exit_code = 4


class ToleranceViolation(MixedPowersError):
    exit_code = 5


class InternalInconsistency(MixedPowersError):
    exit_code = 1
