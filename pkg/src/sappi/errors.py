"""Exception types shared across the toolkit."""


class SappiError(Exception):
    """Base class for all toolkit errors."""


class OperandError(SappiError, ValueError):
    """A micro-op referenced a bad cell (unknown id, or source == target)."""


class ConfigurationError(SappiError, ValueError):
    """A step program was invoked with missing or invalid input bindings."""


class UnsupportedKindError(SappiError, ValueError):
    """The requested adder kind cannot perform this operation."""


class ConsistencyError(SappiError, RuntimeError):
    """Step-program execution disagreed with the boolean closed form."""


class RangeError(SappiError, ValueError):
    """An operand or parameter is outside its allowed range."""


class ResourceLimitError(SappiError, ValueError):
    """The requested enumeration exceeds the built-in resource guard."""


class FormatError(SappiError, ValueError):
    """A binary file (netpbm, IDX, weights) violates its format contract."""


class DimensionMismatchError(SappiError, ValueError):
    """Two images or arrays that must agree in shape do not."""
