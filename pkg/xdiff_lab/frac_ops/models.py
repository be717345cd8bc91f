# xdiff_lab/frac_ops/models.py
from pydantic import BaseModel, ConfigDict, Field


class QuadratureSettings(BaseModel):
    """Controls of the principal-value quadrature"""

    model_config = ConfigDict(frozen=True)

    r_split: float = Field(default=1.0, gt=0, description="Near/far split radius")
    tail_R: float = Field(default=1e3, gt=0, description="Far-field truncation radius")
    quad_tol: float = Field(default=1e-10, gt=0, description="Absolute tolerance")
    panel: float = Field(
        default=4.0, gt=0, description="Maximum far-field panel length"
    )


class WeightRatioReport(BaseModel):
    """Ratios |(-Delta)^alpha psi| / psi and |grad psi| / psi for psi = log(2+|x|^2)"""

    model_config = ConfigDict(frozen=True)

    alpha: float
    x: list[float] = Field(description="Radial sample positions")
    laplacian_ratio: list[float]
    gradient_ratio: list[float]
    laplacian_constant: float = Field(description="Fitted bound, max of the ratios")
    gradient_constant: float = Field(description="Fitted bound, max of the ratios")
