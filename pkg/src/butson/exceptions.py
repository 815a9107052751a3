class ValidationError(ValueError):
    """An object violates one of its structural invariants."""


class ParameterError(ValueError):
    """Arguments are individually valid but incompatible."""


class ParseError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ResourceLimit(RuntimeError):
    """A bounded search or enumeration would exceed its configured budget."""


class NotApplicable(ValueError):
    """A screen's hypotheses do not hold for the given parameters."""
