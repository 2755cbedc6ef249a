"""Exception types shared across the library.

Exit-code mapping used by the CLI: ValidationError -> 1, DomainError
(and subclasses) -> 2.
"""


class SpikedDetectError(Exception):
    """Base class for all library errors."""


class ValidationError(SpikedDetectError, ValueError):
    """Malformed input: bad config keys, dimension mismatches, invalid priors."""


class DomainError(SpikedDetectError, ValueError):
    """Numerical-domain violation: SNR outside the admissible range,
    spectral argument inside the bulk support, log of a nonpositive value."""


class SupercriticalSpectrumError(DomainError):
    """An eigenvalue sits at or beyond the singularity of the log-det term,
    i.e. at or past the outlier location the test statistic presumes absent.

    Carries the offending eigenvalue and the singular location so callers
    can report which observation certified the supercritical regime.
    """

    def __init__(self, eigenvalue, location, case=""):
        self.eigenvalue = float(eigenvalue)
        self.location = float(location)
        prefix = f"{case}: " if case else ""
        super().__init__(
            f"{prefix}eigenvalue {self.eigenvalue:.6g} at or beyond the "
            f"singular location {self.location:.6g}; the statistic is only "
            f"defined on subcritical spectra"
        )


class QuadratureError(SpikedDetectError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved tolerance {achieved:.3e})"
        super().__init__(message)


class ConsistencyError(SpikedDetectError, RuntimeError):
    """Closed-form and quadrature routes disagree beyond tolerance."""
