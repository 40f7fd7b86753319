class ConfigError(ValueError):
    """Invalid model or experiment configuration."""


class PreconditionError(ValueError):
    """A parameter combination outside the range where a bound or estimator is defined."""


class ResourceCapError(RuntimeError):
    """Problem size exceeds a declared cap (e.g. dense eigensolver size)."""
