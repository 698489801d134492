"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An operation was called with arguments outside its domain."""


class ConfigError(ValueError):
    """A scenario description is malformed or inconsistent."""

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)


class DegenerateRangeError(ValueError):
    """A min/max normalization range collapsed to a single point."""
