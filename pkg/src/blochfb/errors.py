"""Exception types shared across the package."""


class BlochFBError(Exception):
    """Base class for all domain errors raised by this package."""


class OutOfPlaneError(BlochFBError):
    """State has a y-component too large for a polar (x-z plane) description."""


class InvalidDensityError(BlochFBError):
    """Matrix is not a valid density matrix (non-Hermitian, trace != 1, or negative)."""


class StateBlowupError(BlochFBError):
    """Integration left the |v| <= 2 trust region; reduce dt.

    Carries the step index at which the blowup was detected.
    """

    def __init__(self, step: int, norm: float):
        self.step = step
        self.norm = norm
        super().__init__(f"state norm {norm:.3g} exceeded 2 at step {step}; reduce dt")


class EmptyWindowError(BlochFBError):
    """No samples remain after discarding the burn-in window."""


class TooFewBatchesError(BlochFBError):
    """Fewer than the minimum number of batches for a reportable error bar."""


class OutOfValidityError(BlochFBError):
    """Requested parameters are outside the validity region of a closed form."""


class PoleEncounteredError(BlochFBError):
    """Spectral denominator vanished: delay at or above the stability threshold."""


class ResolutionTooCoarseError(BlochFBError):
    """Quadrature grid does not resolve the integrand's oscillation."""
