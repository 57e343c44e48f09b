"""Exception hierarchy.

Every error carries a short ``category`` used by the CLI to build its
exit code and message prefix.
"""


class TkeoEegError(Exception):
    category = "error"
    exit_code = 1


class ParameterError(TkeoEegError, ValueError):
    category = "parameter"
    exit_code = 2


class EmptyResultError(TkeoEegError, ValueError):
    """Input too short to yield even one window."""

    category = "empty"
    exit_code = 3


class TooShortError(TkeoEegError, ValueError):
    category = "too-short"
    exit_code = 3


class DesignError(TkeoEegError, ValueError):
    """A filter cannot be realized at the requested sample rate."""

    category = "design"
    exit_code = 4


class DegenerateInputError(TkeoEegError, ValueError):
    category = "degenerate"
    exit_code = 5


class LayoutError(TkeoEegError, ValueError):
    category = "layout"
    exit_code = 6


class StratificationError(TkeoEegError, ValueError):
    category = "stratification"
    exit_code = 7


class UndefinedMetricError(TkeoEegError, ValueError):
    category = "metric"
    exit_code = 7


class IngestError(TkeoEegError, ValueError):
    category = "ingest"
    exit_code = 8
