"""Exception types shared across the package."""


class StancemonError(Exception):
    """Base class for all pipeline errors."""


class DataFormatError(StancemonError):
    """Malformed or inconsistent input data.

    Carries a 1-based line number when the failure is tied to a
    specific line of an input file.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelArtifactError(StancemonError):
    """Model artifact file is corrupt, wrong version, or wrong kind."""
