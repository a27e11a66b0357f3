"""Exception hierarchy shared across the package."""


class InputDomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ResourceGuardError(InputDomainError):
    """A request was rejected because it would exceed a desk-scale resource cap."""


class SequencingError(RuntimeError):
    """A stateful model was driven out of its legal cycle order."""


class WeightFileError(InputDomainError):
    """A weight file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
