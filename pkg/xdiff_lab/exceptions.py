# exceptions.py
from typing import Any


class XDiffError(Exception):
    """Base exception for laboratory errors"""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class ConfigError(XDiffError):
    """Raised when there's a configuration error"""

    pass


class AdmissibilityError(XDiffError):
    """Raised when parameters violate the admissibility conditions"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report

    def __str__(self) -> str:
        base_msg = super().__str__()
        violations = getattr(self.report, "violations", None)
        if violations:
            codes = ", ".join(v.code for v in violations)
            return f"{base_msg} (violated: {codes})"
        return base_msg


class FieldError(XDiffError):
    """Raised when a gridded field is non-finite, non-real or mis-shaped"""

    pass


class UnderResolutionError(XDiffError):
    """Raised when the grid does not resolve a kernel"""

    def __init__(
        self,
        message: str,
        required_M: int | None = None,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message, details)
        self.required_M = required_M

    def __str__(self) -> str:
        base_msg = super().__str__()
        if self.required_M is not None:
            return f"{base_msg} (requires M >= {self.required_M})"
        return base_msg


class QuadratureError(XDiffError):
    """Raised when adaptive quadrature does not converge"""

    pass


class SolverBlowupError(XDiffError):
    """Raised when the PDE solver detects a non-finite or exploding field"""

    def __init__(
        self,
        message: str,
        time: float | None = None,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message, details)
        self.time = time

    def __str__(self) -> str:
        base_msg = super().__str__()
        if self.time is not None:
            return f"{base_msg} (at t = {self.time:.6g})"
        return base_msg


class AlignmentError(XDiffError):
    """Raised when paired trajectories do not share snapshot times or grids"""

    pass
