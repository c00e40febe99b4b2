"""Exception hierarchy shared by all pdmosc modules."""


class PdmoscError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PdmoscError, ValueError):
    """Position-dependent mass is zero or negative, or a parameter is out of range."""


class SizeError(PdmoscError, ValueError):
    """Matrix dimension too small or mismatched."""


class TruncationError(PdmoscError):
    """A basis index lies outside the trusted block of a truncated matrix."""


class NotHermitian(PdmoscError):
    """Matrix fails the Hermiticity check required by the eigensolver."""


class NotConverged(PdmoscError):
    """Eigenvalue did not settle as the truncation dimension grew."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class FitError(PdmoscError):
    """Polynomial fit residual exceeds its tolerance."""


class StepError(PdmoscError):
    """Integrator produced a non-finite state."""


class NotFound(PdmoscError):
    """A search failed to bracket the requested quantity."""
