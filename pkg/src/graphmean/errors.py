class GraphMeanError(Exception):
    """Base class for all errors raised by graphmean."""


class InvalidArgumentError(GraphMeanError, ValueError):
    pass


class UnsupportedSizeError(GraphMeanError):
    """Raised when an exhaustive routine is asked to handle too many nodes."""


class ParseError(GraphMeanError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)
