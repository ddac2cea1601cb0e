"""Exception types shared across the package."""


class CritlabError(Exception):
    """Base class for all critlab errors."""


class DomainError(CritlabError, ValueError):
    """An argument violates an operation's precondition."""


class DataError(CritlabError):
    """Required table data (e.g. local coefficients) is missing."""


class PoleError(CritlabError, ZeroDivisionError):
    """Evaluation requested exactly at a pole."""


class AccuracyError(CritlabError):
    """Requested precision is unreachable; carries the achieved bound."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ResourceError(CritlabError):
    """A computation would exceed its memory/term budget."""

    def __init__(self, message, budget=None, required=None):
        super().__init__(message)
        self.budget = budget
        self.required = required


class EmptyScheduleError(CritlabError):
    """A prime-block schedule came out empty (J = 0)."""

    def __init__(self, message, min_T=None):
        super().__init__(message)
        self.min_T = min_T


class StatisticsError(CritlabError):
    """A distributional statistic cannot be formed (e.g. empty tail cell)."""


class ResolutionError(CritlabError):
    """A discretized integral's estimated error exceeds its tolerance."""


class FitError(CritlabError, ValueError):
    """A regression has degenerate inputs."""


class CacheError(CritlabError):
    """A cache entry is corrupt or unreadable."""
