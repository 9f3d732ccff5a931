"""Exception hierarchy and warning categories shared by the library and the CLI."""
from typing import Optional


class RamanModelError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code = 1


class ConfigValidationError(RamanModelError, ValueError):
    """A parameter or configuration document violates an invariant."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DegenerateCouplingError(ConfigValidationError):
    """Both sideband couplings vanish, so no beating is possible."""


class UnsupportedMomentError(RamanModelError, ValueError):
    pass


class MomentOrderError(RamanModelError, ValueError):
    pass


class UndefinedCorrelationError(RamanModelError, ValueError):
    """A normalized quantity was requested for a mode with zero photons."""


class BasisMismatchError(RamanModelError, ValueError):
    pass


class ResourceLimitError(RamanModelError):
    exit_code = 2


class TruncationError(ResourceLimitError):
    """Truncation tail above tolerance while running in strict mode."""


class ReportWriteError(ResourceLimitError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"Failed to write {path}: {reason}")


class VerificationFailure(RamanModelError):
    exit_code = 3


class ValidityBoundWarning(UserWarning):
    """g*t exceeds the level where higher-order sidebands stay negligible."""


class CoherenceBoundWarning(UserWarning):
    pass


class TruncationWarning(UserWarning):
    pass


class EmptyCurveWarning(UserWarning):
    """A curve payload had no rows, so no plot file was written."""


def config_error_from_validation(exc) -> ConfigValidationError:
    """Convert a pydantic ValidationError into a ConfigValidationError naming the first bad field."""
    errors = exc.errors()
    if not errors:
        return ConfigValidationError(str(exc))
    first = errors[0]
    field = ".".join(str(part) for part in first.get("loc", ())) or None
    return ConfigValidationError(first.get("msg", "invalid value"), field=field)
