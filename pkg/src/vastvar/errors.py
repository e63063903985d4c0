"""Shared exception types."""


class DataError(ValueError):
    """Raised when input data violates the ingestion or design contracts."""


class NumericalError(RuntimeError):
    """Raised when a linear-algebra step fails beyond recovery (e.g. non-SPD matrix)."""


class ConfigError(ValueError):
    """Raised when a run configuration fails validation.

    The message carries the offending field path (dot-separated).
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
