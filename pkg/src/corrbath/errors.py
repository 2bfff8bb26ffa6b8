"""Exception hierarchy shared by all corrbath modules."""


class CorrbathError(Exception):
    """Base class for every error raised by the package."""


class ShapeError(CorrbathError, ValueError):
    """Matrix dimensions are inconsistent with the requested operation."""


class CapacityError(CorrbathError, ValueError):
    """Request exceeds the supported problem size."""


class ConvergenceError(CorrbathError, RuntimeError):
    """An iterative routine failed to converge."""

    def __init__(self, message, iterations=None):
        if iterations is not None:
            message = f"{message} (after {iterations} iterations)"
        super().__init__(message)
        self.iterations = iterations


class NumericalQualityError(CorrbathError, RuntimeError):
    """A computed quantity violates a physical constraint beyond tolerance."""


class StructuralError(CorrbathError, RuntimeError):
    """The assembled generator lacks a structural property it must have."""


class ValidationError(CorrbathError, ValueError):
    """User input failed validation. ``errors`` lists every violation found."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
