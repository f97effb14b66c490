"""Exception hierarchy shared by all pipeline stages.

Exit-code mapping used by the CLI:
  ConfigError  -> 1 (usage / configuration)
  DataError    -> 2 (malformed or inconsistent input data)
  IntegrityError -> 3 (internal invariant violation)
"""


class CapsalError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CapsalError):
    """Invalid configuration or command-line usage."""


class DataError(CapsalError):
    """Malformed input data (parse failures, schema violations)."""


class DataFormatError(DataError):
    """A record or line that does not follow the documented format."""

    def __init__(self, path, lineno, reason):
        self.path = str(path)
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"{self.path}:{lineno}: {reason}")


class IntegrityError(CapsalError):
    """A structural invariant was violated (dangling edge, cycle, ...)."""
