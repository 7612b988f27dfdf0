"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PlumbSeriesError(Exception):
    exit_code = 1


class UsageError(PlumbSeriesError, ValueError):
    exit_code = 2


class ConfigurationError(UsageError):
    """Unsupported lattice family or rank."""


class MoveInapplicableError(UsageError):
    pass


class TruncationError(PlumbSeriesError):
    exit_code = 3


class EvaluationUndefinedError(TruncationError):
    """Raised when t = 1 would collect infinitely many terms."""


class UnsupportedManifoldError(PlumbSeriesError):
    exit_code = 4


class ResourceError(UnsupportedManifoldError):
    """An enumeration cap was exceeded."""


class IntegrityError(PlumbSeriesError):
    exit_code = 5
