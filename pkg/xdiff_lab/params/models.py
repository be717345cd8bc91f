# xdiff_lab/params/models.py
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class ConditionCode(str, Enum):
    """Machine-readable identifiers of the admissibility conditions"""

    ALPHA_RANGE = "ALPHA_RANGE"
    BETA_RANGE = "BETA_RANGE"
    SELF_DIFFUSION = "SELF_DIFFUSION"
    D1_EXPONENTS = "D1_EXPONENTS"
    SIGMA_POSITIVE = "SIGMA_POSITIVE"
    SHAPE = "SHAPE"
    POSITIVE = "POSITIVE"
    DELTA_RANGE = "DELTA_RANGE"
    KAPPA_HAT_BOUND = "KAPPA_HAT_BOUND"
    KAPPA_INTERVAL_EMPTY = "KAPPA_INTERVAL_EMPTY"
    KAPPA_LOWER = "KAPPA_LOWER"
    KAPPA_UPPER = "KAPPA_UPPER"
    KAPPA_ORDER = "KAPPA_ORDER"


class Violation(BaseModel):
    """A single violated condition"""

    model_config = ConfigDict(frozen=True)

    code: ConditionCode = Field(description="Condition identifier")
    message: str = Field(description="Human-readable description")


class ValidationReport(BaseModel):
    """Outcome of an admissibility check"""

    model_config = ConfigDict(frozen=True)

    ok: bool = Field(description="True iff no condition is violated")
    violations: list[Violation] = Field(default_factory=list)
    kappa_interval_nonempty: bool | None = Field(
        default=None,
        description="Whether delta(1+rho)d < d/(d+3); scaling reports only",
    )

    def codes(self) -> set[ConditionCode]:
        return {v.code for v in self.violations}


class ModelParams(BaseModel):
    """Species count, exponents, diffusion coefficients and interaction matrix.

    No constraint here raises: admissibility is reported by ``validate_model``.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(description="Number of species")
    alpha: float = Field(description="Diffusion exponent, (-Delta)^alpha")
    beta: float = Field(description="Order of the fractional gradient")
    sigma: list[float] = Field(description="Diffusion coefficient per species")
    a: list[list[float]] = Field(description="Interaction matrix a_ij")
    d: int = Field(default=1, description="Spatial dimension")

    def scaled_interaction(self, factor: float) -> "ModelParams":
        """Copy with the interaction matrix multiplied by ``factor``"""
        return self.model_copy(
            update={"a": [[factor * a_ij for a_ij in row] for row in self.a]}
        )

    def without_interaction(self) -> "ModelParams":
        return self.scaled_interaction(0.0)


class ScalingParams(BaseModel):
    """Scaling parameter N and the exponents of the moderate scaling"""

    model_config = ConfigDict(frozen=True)

    N: int = Field(description="Scaling parameter")
    d: int = Field(default=1, description="Spatial dimension")
    delta: float = Field(description="Exponent of delta_N = N^-delta")
    rho: float = Field(default=0.05, description="Small positive margin")
    kappa: float = Field(description="Exponent of kappa_N = N^(kappa/d)")
    kappa_hat: float = Field(description="Exponent of kappa_hat_N = N^(kappa_hat/d)")

    def with_N(self, N: int) -> "ScalingParams":
        return self.model_copy(update={"N": N})


class DerivedScales(BaseModel):
    """kappa_N, kappa_hat_N and delta_N for one N"""

    model_config = ConfigDict(frozen=True)

    kappa_N: float
    kappa_hat_N: float
    delta_N: float
