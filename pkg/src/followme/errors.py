"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value violates its documented constraints."""


class ProtocolError(RuntimeError):
    """An operation was invoked in a state that does not permit it."""


class MeasurementError(ValueError):
    """A sensor sample is unusable (non-finite or negative distance)."""
