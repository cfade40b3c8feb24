"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/data problems exit 2,
numerical failures exit 3.
"""


class FiberTpaError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FiberTpaError):
    """A run configuration is missing, malformed, or inconsistent."""


class DataError(FiberTpaError):
    """An input data file or in-memory dataset violates its contract."""


class FitError(FiberTpaError):
    """A fitting routine failed to converge or was fed unusable data."""
