"""Exception types; each carries the CLI exit code it maps to."""


class PirgaitError(Exception):
    exit_code = 1


class ParseError(PirgaitError, ValueError):
    """Malformed input document. ``line`` is 1-based when known."""

    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientDataError(PirgaitError):
    exit_code = 3


class ConvergenceError(PirgaitError):
    exit_code = 4
