"""Exception types shared across the package."""


class ThzcapError(Exception):
    """Base class for all package errors."""


class DomainError(ThzcapError, ValueError):
    """An argument lies outside the domain of an operation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ValidationError(ThzcapError, ValueError):
    """A value object violates one of its invariants."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class OutOfRangeError(ThzcapError, ValueError):
    """A table lookup fell outside the tabulated range."""


class ParseError(ThzcapError, ValueError):
    """Malformed input text. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = source
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class NumericalError(ThzcapError, ArithmeticError):
    """An iterative numerical method did not reach its tolerance.

    Carries the best available estimate and the tolerance actually achieved.
    """

    def __init__(self, message: str, estimate: float, achieved_tol: float):
        self.estimate = estimate
        self.achieved_tol = achieved_tol
        super().__init__(f"{message} (estimate={estimate!r}, achieved rel. tol={achieved_tol:.3g})")
