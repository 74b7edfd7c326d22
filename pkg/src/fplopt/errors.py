"""Exception types shared across the package."""


class FplOptError(Exception):
    """Base class for all package errors."""


class SchemaError(FplOptError):
    """A required column is missing from an input file."""

    def __init__(self, column: str, path: str = ""):
        self.column = column
        self.path = path
        super().__init__(f"missing required column '{column}'" + (f" in {path}" if path else ""))


class RowError(FplOptError):
    """A row of an input file could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class UnknownPlayerError(FplOptError):
    """Requested player id has no records in the panel."""


class NoHistoryError(FplOptError):
    """An estimator was called on an empty series."""


class EmptyPoolError(FplOptError):
    """No players survived pool construction; nothing to optimize."""


class PoolTooLargeError(FplOptError):
    """Brute-force enumeration refused: the pool exceeds the tractable size."""


class InfeasibleError(FplOptError):
    """The selection problem has no feasible solution.

    ``resource`` names the first violated resource (e.g. 'budget',
    'positions', 'club_quota', 'locks').
    """

    def __init__(self, resource: str, message: str):
        self.resource = resource
        super().__init__(f"infeasible ({resource}): {message}")
