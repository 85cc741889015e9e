"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes do not agree."""


class BreakdownError(ArithmeticError):
    """Conjugate gradient hit p^T A p <= 0; the matrix is not SPD."""


class TraceFormatError(ValueError):
    """A trace file does not follow the trace format."""


class ConfigError(ValueError):
    """A campaign or model configuration is invalid."""
