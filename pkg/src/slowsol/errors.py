"""Exception types shared across the package."""


class SlowsolError(Exception):
    """Base class for all errors raised by slowsol."""


class DistributionError(SlowsolError):
    """Invalid detuning-distribution request."""


class GridError(SlowsolError):
    """Evaluation point outside the grid, or a malformed grid."""


class StepSizeError(SlowsolError):
    """Integration step too large for the fastest frequency present."""


class UnitaryError(SlowsolError):
    """Polarization-frame matrix is not unitary."""


class TrackingError(SlowsolError):
    """No identifiable soliton in a field history."""


class SpectralCollisionError(SlowsolError):
    """Spectral parameter coincides with a detuning quadrature node."""


class DerivativeError(SlowsolError):
    """Finite-difference derivative did not stabilize under step halving."""


class WindowError(SlowsolError):
    """Integration window too short for a localized-mode quadrature."""


class IntegrationError(SlowsolError):
    """Numerical integration produced non-finite values."""
