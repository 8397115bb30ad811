"""Exception hierarchy shared by every module."""


class TopPushError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionMismatch(TopPushError):
    pass


class EmptyClass(TopPushError):
    pass


class NonFiniteValue(TopPushError):
    pass


class DomainViolation(TopPushError):
    """A dual coordinate fell outside the conjugate's domain."""


class ParseError(TopPushError):
    """Malformed input line; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)


class UnknownLabel(ParseError):
    """A label outside {+1, -1, 1, 0}."""
