"""Exception hierarchy shared by the library and the CLI.

Each family maps to a stable process exit status used by ``aucgap audit``.
"""


class AuditError(Exception):
    """Base class for all errors raised by aucgap."""

    exit_code = 1


class ConfigError(AuditError, ValueError):
    """Invalid configuration: unknown columns, missing task fields, bad specs."""

    exit_code = 2


class ParseError(AuditError, ValueError):
    """Malformed input file. The message names the line and column."""

    exit_code = 3

    def __init__(self, message, line=None, column=None):
        if line is not None and column is not None:
            message = f"line {line}, column {column}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class DegenerateDataError(AuditError, ValueError):
    """The data cannot support the requested computation."""

    exit_code = 4


class AucUndefinedError(DegenerateDataError):
    """AUC undefined for this set: it lacks positives or negatives."""


class InputIOError(AuditError, OSError):
    exit_code = 5
