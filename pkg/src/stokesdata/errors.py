"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class."""


class UsageError(ArtifactError, ValueError):
    """Bad input: wrong shape, non-coprime parameters, unparsable file."""


class UnsupportedCaseError(ArtifactError):
    """The requested construction is not defined for these parameters."""


class VerificationError(ArtifactError):
    """A structural property that should hold does not."""


class NoSplittingError(VerificationError):
    """Filtrations are not opposite, so no splitting exists."""


class CalibrationError(ArtifactError):
    """Zero or several convention assignments survive calibration."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GeometryError(ArtifactError):
    """Numerical geometry left its validity range (undefined point, tie, degenerate ray)."""
