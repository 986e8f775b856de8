"""
Exception hierarchy shared by every fracwave module.
"""


class FracwaveError(ValueError):
    """
    Base class for domain errors. The command line maps these to exit code 1.
    """

    pass


class GridError(FracwaveError):
    """Raised for an invalid grid size or field length."""

    pass


class SymmetryError(FracwaveError):
    """Raised when a real field is requested from non-Hermitian coefficients."""

    pass


class ResolutionError(FracwaveError):
    """
    Raised when two objects live on incompatible grids, or when a grid is too coarse
    for the Fourier modes an operation needs.
    """

    pass


class ProfileError(FracwaveError):
    """Raised for invalid damping profile parameters or data."""

    pass


class IntegrationError(FracwaveError):
    """
    Raised when the time integrator fails.

    Attributes:
        time_reached: Last time the integrator reached before failing.
    """

    def __init__(self, message: str, time_reached: float):
        super().__init__(f"{message} (reached t={time_reached:.6g})")
        self.time_reached = time_reached


class DecayFitError(FracwaveError):
    """Raised when a decay exponent cannot be fitted."""

    pass


class EigenSolverError(FracwaveError):
    """Raised when the eigen-solver fails to converge."""

    pass


class NearResonanceError(FracwaveError):
    """
    Raised when the resolvent is evaluated at or near a resonance.

    Attributes:
        tau: The spectral parameter.
        sigma_min: Smallest singular value found.
    """

    def __init__(self, tau: complex, sigma_min: float):
        super().__init__(f"tau={tau} is at or near a resonance (sigma_min={sigma_min:.3e})")
        self.tau = tau
        self.sigma_min = sigma_min


class ConfigError(FracwaveError):
    """Raised for malformed configuration files or keys. Treated as a usage error."""

    pass


class ArtifactError(FracwaveError):
    """Raised when an output file cannot be written."""

    pass
