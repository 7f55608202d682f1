"""Exception hierarchy shared by all modules."""


class TwoCentersError(Exception):
    """Base class for every error raised by the package."""


class DomainError(TwoCentersError, ValueError):
    pass


class SingularityError(TwoCentersError, ValueError):
    pass


class ChartSingularity(TwoCentersError, ValueError):
    """Momenta are undefined at the requested point of a chart.

    ``positions`` carries the (well defined) position part of the converted
    state so callers can still use it.
    """

    def __init__(self, message, positions=None):
        super().__init__(message)
        self.positions = positions


class ExplicitlyDegenerate(TwoCentersError, ValueError):
    pass


class InadmissiblePoint(TwoCentersError, ValueError):
    pass


class CriticalPoint(TwoCentersError, ValueError):
    pass


class DegenerateCell(CriticalPoint):
    pass


class BandEdge(TwoCentersError, ValueError):
    pass


class BandError(TwoCentersError, ValueError):
    pass


class NonzeroQ(TwoCentersError, ValueError):
    pass


class ToleranceExceeded(TwoCentersError, RuntimeError):
    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class NoRoot(TwoCentersError, RuntimeError):
    pass


class NoClosure(TwoCentersError, RuntimeError):
    pass


class InconsistentCounts(TwoCentersError, RuntimeError):
    pass


class VerificationFailure(TwoCentersError, RuntimeError):
    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data
