"""Exception hierarchy. Each class carries the CLI error category and exit code."""


class LifmapError(Exception):
    category = "internal"
    exit_code = 1


class ConfigError(LifmapError, ValueError):
    """Invalid parameter values or malformed spec files."""

    category = "config"
    exit_code = 2


class CapacityError(LifmapError):
    """More compartments requested than the configured cores can hold."""

    category = "capacity"
    exit_code = 3


class MappingError(LifmapError, ValueError):
    category = "mapping"
    exit_code = 4


class DecayRangeError(MappingError):
    """A decay mantissa would fall outside the 12-bit range [0, 4096]."""


class OutputError(LifmapError, OSError):
    category = "io"
    exit_code = 5


class UndefinedCorrelationError(LifmapError, ValueError):
    """Pearson r requested on a constant series."""

    category = "metric"
    exit_code = 6


class LengthMismatchError(LifmapError, ValueError):
    category = "metric"
    exit_code = 6
