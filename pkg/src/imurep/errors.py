"""Exception hierarchy shared by every stage of the pipeline."""


class ImurepError(Exception):
    """Base class for all errors raised by this package."""


class EmptySeriesError(ImurepError, ValueError):
    pass


class InvalidWindowError(ImurepError, ValueError):
    pass


class StreamOrderError(ImurepError, ValueError):
    """Timestamps went backwards (or repeated) within one stream."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(ImurepError, ValueError):
    """A file could not be parsed; carries the 1-based line number when known."""

    def __init__(self, message, line=None, field=None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field {field!r}")
        if prefix:
            message = ", ".join(prefix) + ": " + message
        super().__init__(message)
        self.line = line
        self.field = field


class FormatVersionError(ParseError):
    pass


class ConfigurationError(ImurepError, ValueError):
    pass


class DuplicateLabelError(ImurepError, KeyError):
    def __str__(self):
        return f"duplicate template label {self.args[0]!r}"
