"""Exception types shared across the package."""


class RajchmanError(Exception):
    """Base class for all package-specific failures."""


class PrecisionError(RajchmanError):
    """A certified computation could not be completed at the requested
    precision; retry with more mantissa bits."""

    def __init__(self, message, required_bits=None):
        super().__init__(message)
        self.required_bits = required_bits


class ResourceLimitError(RajchmanError):
    """A configured cap (word count, closure size, memo size) was exceeded."""


class ContractError(RajchmanError):
    """A documented precondition of an operation was violated."""


class ConfigError(RajchmanError):
    """Malformed configuration input; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line
