"""Exception hierarchy. The CLI reports ``type(err).__name__`` on exit code 1."""


class ThresholdScopeError(Exception):
    """Base class for computational failures."""


class NonConvergence(ThresholdScopeError):
    pass


class StepUnderflow(ThresholdScopeError):
    pass


class NoRoot(ThresholdScopeError):
    pass


class TruncationFailure(ThresholdScopeError):
    pass


class InconsistentWronskian(ThresholdScopeError):
    pass


class BoundViolation(ThresholdScopeError):
    def __init__(self, estimate, ratio):
        super().__init__(f"estimate {estimate} violated: max ratio {ratio:.6g}")
        self.estimate = estimate
        self.ratio = ratio


class WronskianTooSmall(ThresholdScopeError):
    pass


class ResidualTooLarge(ThresholdScopeError):
    pass


class DomainError(ThresholdScopeError, ValueError):
    pass


class NearBranchPoint(DomainError):
    pass


class GridTooCoarse(ThresholdScopeError):
    pass


class EigenvalueLost(ThresholdScopeError):
    pass


class MonotonicityViolation(ThresholdScopeError):
    pass


class Inconclusive(ThresholdScopeError):
    pass


class PotentialFormatError(ThresholdScopeError, ValueError):
    pass
