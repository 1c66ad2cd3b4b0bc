"""Exception types raised across the package."""


class SgdecoError(Exception):
    """Base class for all package errors."""


class ConfigError(SgdecoError, ValueError):
    """Invalid scenario configuration or parameter value."""


class GridError(SgdecoError, ValueError):
    """Sampled inputs do not share a time grid, or a grid is too large or too coarse."""


class OutOfRangeError(SgdecoError, ValueError):
    """Requested time lies outside the sampled interval."""


class DivergentIntegralError(SgdecoError, ArithmeticError):
    """A PSD model with degenerate cutoffs has infinite total power."""


class TruncationError(SgdecoError, ValueError):
    """A frequency grid misses too much of the PSD power."""


class SingularityError(SgdecoError, ArithmeticError):
    """An integration approached a singular point of the equation."""


class ScenarioMismatchError(SgdecoError, ValueError):
    """The requested evaluation mode does not apply to the given scenario."""
