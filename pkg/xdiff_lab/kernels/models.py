# xdiff_lab/kernels/models.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.interpolate import CubicSpline

from xdiff_lab.params.models import ScalingParams
from xdiff_lab.params.validation import derived_scales


class KernelKind(str, Enum):
    """Members of the mollifier family"""

    W_N = "W_N"
    W_HAT_N = "W_hat_N"
    V_HAT_N = "V_hat_N"


class MollifierFamily(BaseModel):
    """W_N, W_hat_N and V_hat_N = W_N * W_hat_N built from one profile W_1.

    Only the standard Gaussian density is implemented for W_1.
    """

    model_config = ConfigDict(frozen=True)

    w1_kind: Literal["gaussian"] = Field(default="gaussian")
    scaling: ScalingParams
    kappa_N: float = Field(gt=0, description="Width scale of W_N")
    kappa_hat_N: float = Field(gt=0, description="Width scale of W_hat_N")

    @classmethod
    def from_scaling(
        cls, scaling: ScalingParams, w1_kind: Literal["gaussian"] = "gaussian"
    ) -> "MollifierFamily":
        scales = derived_scales(scaling)
        return cls(
            w1_kind=w1_kind,
            scaling=scaling,
            kappa_N=scales.kappa_N,
            kappa_hat_N=scales.kappa_hat_N,
        )

    @property
    def d(self) -> int:
        return self.scaling.d

    @property
    def N(self) -> int:
        return self.scaling.N


class AssumptionReport(BaseModel):
    """Numerical spot check of the three Fourier-side conditions on W_1"""

    model_config = ConfigDict(frozen=True)

    bounded: bool = Field(description="sup |F(W_1)| <= 1 and finite second derivatives")
    sup_abs: float
    sup_laplacian: float
    exponential_decay: bool = Field(
        description="|F(W_1)(xi)| <= exp(-|xi|) for every sample with |xi| >= 2"
    )
    hessian_growth: bool = Field(
        description="|Delta F(W_1)| <= C (1+|xi|^2) |F(W_1)| with C = max(1, d)"
    )
    hessian_ratio: float = Field(description="max |Delta F| / ((1+|xi|^2) |F|)")

    @property
    def ok(self) -> bool:
        return self.bounded and self.exponential_decay and self.hessian_growth


@dataclass(frozen=True)
class ForceTable:
    """Radial profile P of grad^beta V_hat_N, so that the force is P(|x|) x/|x|.

    ``kind`` is ``"periodic"`` for the torus kernel or ``"free"`` for R^d.
    Beyond ``r_max`` the profile evaluates to 0.
    """

    r: np.ndarray = field(repr=False)
    profile: np.ndarray = field(repr=False)
    kind: Literal["periodic", "free"]
    beta: float
    d: int
    r_max: float
    spline: CubicSpline = field(repr=False, compare=False)

    def __call__(self, r: np.ndarray | float) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        values = self.spline(np.clip(r, 0.0, self.r_max))
        return np.where(r <= self.r_max, values, 0.0)

    def force(self, dx: np.ndarray) -> np.ndarray:
        """grad^beta V_hat_N at displacements ``dx`` of shape (..., d)"""
        dx = np.asarray(dx, dtype=np.float64)
        r = np.sqrt(np.sum(dx**2, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(r > 0.0, self(r) / r, 0.0)
        return dx * scale[..., None]

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.profile)))
