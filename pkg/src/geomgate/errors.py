"""Exception types shared across the package."""


class GeomgateError(Exception):
    """Base class for all geomgate errors."""


class NonUnitaryInput(GeomgateError):
    """A matrix argument failed the unitarity check."""


class UnknownGateName(GeomgateError):
    """Gate identifier is not one of the supported named gates."""


class InvalidDuration(GeomgateError):
    """Segment duration must be strictly positive."""


class OutOfRange(GeomgateError):
    """Time argument lies outside the segment."""


class StepTooLarge(GeomgateError):
    """Integrator step too coarse for the requested evolution."""


class NotCyclic(GeomgateError):
    """Trajectory does not return to its initial ray."""


class PathNotClosed(GeomgateError):
    """Bloch path endpoints do not coincide."""


class SingularSystem(GeomgateError):
    """Tomography inputs are not informationally complete."""


class FitDiverged(GeomgateError):
    """Decay fit failed to converge; carries the best iterate in ``fit``."""

    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


class ConfigError(GeomgateError):
    """Experiment configuration failed to load or validate."""
