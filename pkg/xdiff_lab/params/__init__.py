# xdiff_lab/params/__init__.py
from xdiff_lab.params.models import (
    ConditionCode,
    DerivedScales,
    ModelParams,
    ScalingParams,
    ValidationReport,
    Violation,
)
from xdiff_lab.params.validation import (
    derived_scales,
    kappa_interval,
    moderate_variance_exponent,
    require_admissible,
    validate_model,
    validate_scaling,
)

__all__ = [
    "ConditionCode",
    "DerivedScales",
    "ModelParams",
    "ScalingParams",
    "ValidationReport",
    "Violation",
    "derived_scales",
    "kappa_interval",
    "moderate_variance_exponent",
    "require_admissible",
    "validate_model",
    "validate_scaling",
]
