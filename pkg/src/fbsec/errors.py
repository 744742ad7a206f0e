"""Exception types shared across the package."""


class FbsecError(Exception):
    """Base class for all package errors."""


class ParameterError(FbsecError, ValueError):
    """A model or control parameter is out of range or non-finite.

    ``field`` names the offending parameter so callers (and the CLI) can
    report which flag to fix.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(FbsecError, ValueError):
    """A function argument is outside the mathematical domain."""


class CaseMismatchError(FbsecError):
    """Closed-form path requested for parameters it does not cover.

    Raised when the rate exponents are not (moderate) integers; callers
    should fall back to the numerical transform-inversion path.
    """


class ConvergenceError(FbsecError):
    """A series, continued fraction, or quadrature failed to converge."""

    def __init__(self, message: str, achieved: float | None = None):
        self.achieved = achieved
        super().__init__(message)


class InversionInstabilityError(FbsecError):
    """Two node counts of the transform inversion disagree materially."""
