# xdiff_lab/__init__.py
from xdiff_lab.config import ExperimentConfig, LoggingConfig, LogHandlerConfig
from xdiff_lab.exceptions import (
    AdmissibilityError,
    AlignmentError,
    ConfigError,
    FieldError,
    QuadratureError,
    SolverBlowupError,
    UnderResolutionError,
    XDiffError,
)
from xdiff_lab.logger import LabLogger
from xdiff_lab.params.models import ModelParams, ScalingParams

__version__ = "0.1.0"

# Initialize the logger when the library is imported
logger = LabLogger()

__all__ = [
    "AdmissibilityError",
    "AlignmentError",
    "ConfigError",
    "ExperimentConfig",
    "FieldError",
    "LabLogger",
    "LogHandlerConfig",
    "LoggingConfig",
    "ModelParams",
    "QuadratureError",
    "ScalingParams",
    "SolverBlowupError",
    "UnderResolutionError",
    "XDiffError",
    "logger",
]
