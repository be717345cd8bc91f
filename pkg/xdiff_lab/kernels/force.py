# xdiff_lab/kernels/force.py
"""Radial tables of the interaction force grad^beta V_hat_N.

The force is grad Phi with Phi = (-Delta)^{(beta-1)/2} V_hat_N, so it is
P(|x|) x/|x| for a radial profile P. Two profiles are available:

* ``free``: the R^d kernel. For the Gaussian V_hat_N with F(V_hat_N) =
  exp(-a |xi|^2) the inverse transform has the closed form
  P(r) = -(2 pi)^{-d/2} r G((b+d+1)/2) / (2^{d/2+1} G(d/2+1) a^{(b+d+1)/2})
  1F1((b+d+1)/2; d/2+1; -r^2/(4a)), with G the Gamma function and b = beta.
* ``periodic`` (d = 1): the torus kernel as a sine series,
  P(r) = -(2/L) sum_k xi_k^beta exp(-a xi_k^2) sin(xi_k r), xi_k = 2 pi k / L,
  which is what the grid path evaluates.

The profile decays like r^{-(d+beta)}; tables span the minimum-image range
and evaluate to 0 beyond it.
"""

from pathlib import Path
from threading import RLock
from typing import Literal

import numpy as np
import pandas as pd
from cachetools import LRUCache, cached
from cachetools.keys import hashkey
from scipy.interpolate import CubicSpline
from scipy.special import gamma, gammaln, hyp1f1, poch

from xdiff_lab.exceptions import ConfigError
from xdiff_lab.frac_ops.grid import PeriodicGrid
from xdiff_lab.kernels.mollifier import kernel_std
from xdiff_lab.kernels.models import ForceTable, KernelKind, MollifierFamily
from xdiff_lab.logger import LabLogger

logger = LabLogger().get_logger(__name__)

TABLE_SAMPLES = 4096
# Above this argument 1F1(b; c; -z) is taken from its asymptotic series
ASYMPTOTIC_Z = 60.0
SERIES_CUTOFF = 1e-17


def _kummer_negative(b: float, c: float, z: np.ndarray) -> np.ndarray:
    """1F1(b; c; -z) for z >= 0"""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = z <= ASYMPTOTIC_Z
    out[small] = hyp1f1(b, c, -z[small])

    large = z[~small]
    if large.size:
        # large-z expansion; the e^{-z} branch is below double precision here
        lead = np.exp(gammaln(c) - gammaln(c - b)) * np.sign(gamma(c - b))
        series = np.zeros_like(large)
        for k in range(12):
            series += poch(b, k) * poch(b - c + 1.0, k) / gamma(k + 1.0) * (
                1.0 / large
            ) ** k
        out[~small] = lead * large ** (-b) * series
    return out


def free_profile(r: np.ndarray, beta: float, std: float, d: int) -> np.ndarray:
    """R^d profile for a Gaussian V_hat_N of per-axis standard deviation ``std``"""
    a = 0.5 * std**2
    b = 0.5 * (beta + d + 1.0)
    c = 0.5 * d + 1.0
    r = np.asarray(r, dtype=np.float64)
    prefactor = -((2.0 * np.pi) ** (-0.5 * d)) * gamma(b) / (
        2.0 ** (0.5 * d + 1.0) * gamma(c) * a**b
    )
    return prefactor * r * _kummer_negative(b, c, r**2 / (4.0 * a))


def periodic_profile(r: np.ndarray, beta: float, std: float, L: float) -> np.ndarray:
    """Torus profile in d = 1 from the sine series of the periodized kernel"""
    a = 0.5 * std**2
    xi_max = np.sqrt(np.log(1.0 / SERIES_CUTOFF) / a)
    k = np.arange(1, int(np.ceil(xi_max * L / (2.0 * np.pi))) + 1)
    xi = 2.0 * np.pi * k / L
    coefficients = xi**beta * np.exp(-a * xi**2)
    r = np.asarray(r, dtype=np.float64)
    return -(2.0 / L) * np.sin(np.multiply.outer(r, xi)) @ coefficients


@cached(
    cache=LRUCache(maxsize=64),
    key=lambda family, beta, grid, kind=None, samples=TABLE_SAMPLES: hashkey(
        family.kappa_N,
        family.kappa_hat_N,
        family.w1_kind,
        beta,
        grid.d,
        grid.L,
        kind or ("periodic" if grid.d == 1 else "free"),
        samples,
    ),
    lock=RLock(),
)
def build_force_table(
    family: MollifierFamily,
    beta: float,
    grid: PeriodicGrid,
    kind: Literal["periodic", "free"] | None = None,
    samples: int = TABLE_SAMPLES,
) -> ForceTable:
    """Tabulate grad^beta V_hat_N on [0, r_max], r_max the torus half-diagonal.

    ``kind`` defaults to ``"periodic"`` in d = 1 and ``"free"`` otherwise.
    """
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"Force tables need 0 < beta < 1, got {beta}")
    kind = kind or ("periodic" if grid.d == 1 else "free")
    std = kernel_std(family, KernelKind.V_HAT_N)

    if kind == "periodic":
        if grid.d != 1:
            raise ConfigError("Periodic force tables are implemented for d = 1 only")
        r_max = 0.5 * grid.L
        r = np.linspace(0.0, r_max, samples)
        profile = periodic_profile(r, beta, std, grid.L)
    elif kind == "free":
        r_max = 0.5 * grid.L * np.sqrt(grid.d)
        r = np.linspace(0.0, r_max, samples)
        profile = free_profile(r, beta, std, grid.d)
    else:
        raise ConfigError(f"Unknown force table kind: {kind}")

    profile[0] = 0.0
    table = ForceTable(
        r=r,
        profile=profile,
        kind=kind,
        beta=beta,
        d=grid.d,
        r_max=float(r_max),
        spline=CubicSpline(r, profile),
    )
    logger.debug(
        "Built force table",
        extra={
            "context": {
                "N": family.N,
                "kind": kind,
                "std": std,
                "peak": table.peak,
                "tail_over_peak": abs(float(profile[-2])) / max(table.peak, 1e-300),
            }
        },
    )
    return table


def grad_beta_vhat_n(
    r: np.ndarray | float, direction: np.ndarray, table: ForceTable
) -> np.ndarray:
    """grad^beta V_hat_N at distance ``r`` along the unit vector ``direction``"""
    r = np.asarray(r, dtype=np.float64)
    return table(r)[..., None] * np.asarray(direction, dtype=np.float64)


def write_force_table_csv(path: str | Path, table: ForceTable) -> Path:
    """Columns ``r,profile``"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"r": table.r, "profile": table.profile}).to_csv(
        path, index=False, float_format="%.17g"
    )
    return path
