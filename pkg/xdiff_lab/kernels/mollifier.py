# xdiff_lab/kernels/mollifier.py
from collections.abc import Iterable, Sequence

import numpy as np
import pandas as pd

from xdiff_lab.exceptions import UnderResolutionError
from xdiff_lab.frac_ops.grid import PeriodicGrid, wavenumbers
from xdiff_lab.frac_ops.operators import fourier_multiplier_apply, gradient, l2_norm
from xdiff_lab.kernels.models import AssumptionReport, KernelKind, MollifierFamily
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.params.models import ScalingParams

logger = LabLogger().get_logger(__name__)

# Profiles are cut where they drop below this fraction of their peak
TRUNCATION = 1e-12
NODES_PER_STD = 4
# Upper bound on stamp entries materialized per chunk
STAMP_BUDGET = 2**22


def kernel_std(family: MollifierFamily, which: KernelKind) -> float:
    """Per-axis standard deviation of the kernel"""
    which = KernelKind(which)
    if which is KernelKind.W_N:
        return 1.0 / family.kappa_N
    if which is KernelKind.W_HAT_N:
        return 1.0 / family.kappa_hat_N
    return float(np.sqrt(family.kappa_N**-2 + family.kappa_hat_N**-2))


def fourier_transform(
    xi: np.ndarray | float, family: MollifierFamily, which: KernelKind
) -> np.ndarray:
    """F(kernel)(xi) for |xi| given elementwise.

    Equals exp(-|xi|^2 s^2 / 2); for V_hat_N this is the product of the
    transforms of W_N and W_hat_N.
    """
    s = kernel_std(family, which)
    xi = np.asarray(xi, dtype=np.float64)
    return np.exp(-0.5 * (xi * s) ** 2)


def gaussian_density(dx: np.ndarray, std: float) -> np.ndarray:
    """Isotropic Gaussian density at displacements whose last axis is the dimension"""
    dx = np.asarray(dx, dtype=np.float64)
    d = dx.shape[-1]
    norm = (2.0 * np.pi * std**2) ** (-0.5 * d)
    return norm * np.exp(-0.5 * np.sum(dx**2, axis=-1) / std**2)


def w_n_eval(
    x: np.ndarray | float, family: MollifierFamily, which: KernelKind = KernelKind.W_N
) -> np.ndarray:
    """kappa^d W_1(kappa x) for the requested kernel.

    ``x`` has shape (..., d); in d = 1 a bare scalar or 1-D array of positions
    is accepted as well.
    """
    x = np.asarray(x, dtype=np.float64)
    if family.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return gaussian_density(x, kernel_std(family, which))


def required_points(
    grid: PeriodicGrid, family: MollifierFamily, which: KernelKind
) -> int:
    """Smallest power-of-two M giving NODES_PER_STD nodes per standard deviation"""
    needed = NODES_PER_STD * grid.L / kernel_std(family, which)
    return max(4, 1 << int(np.ceil(np.log2(needed))))


def is_resolved(grid: PeriodicGrid, family: MollifierFamily, which: KernelKind) -> bool:
    return grid.h * NODES_PER_STD <= kernel_std(family, which) * (1.0 + 1e-12)


def check_resolved(
    grid: PeriodicGrid, family: MollifierFamily, which: KernelKind
) -> None:
    if not is_resolved(grid, family, which):
        required = required_points(grid, family, which)
        raise UnderResolutionError(
            f"Grid spacing {grid.h:.4g} does not resolve {KernelKind(which).value} "
            f"(std {kernel_std(family, which):.4g}) at N={family.N}",
            required_M=required,
            details={"M": grid.M, "N": family.N, "kernel": KernelKind(which).value},
        )


def _stamp_offsets(std: float, grid: PeriodicGrid) -> tuple[np.ndarray, float]:
    radius = std * float(np.sqrt(2.0 * np.log(1.0 / TRUNCATION)))
    half = int(np.ceil(radius / grid.h)) + 1
    if 2 * half + 1 >= grid.M:
        return np.arange(-(grid.M // 2), grid.M // 2), radius
    return np.arange(-half, half + 1), radius


def deposit_points(
    points: np.ndarray,
    weight: float | np.ndarray,
    std: float,
    grid: PeriodicGrid,
) -> np.ndarray:
    """Sum of weighted Gaussian stamps of standard deviation ``std`` at the nodes.

    Each stamp is the exact kernel value at the minimum-image distance,
    truncated below TRUNCATION of its peak. Accumulation goes through
    ``np.bincount`` in particle order, so the result is deterministic.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, grid.d)
    count = points.shape[0]
    out = np.zeros(grid.M**grid.d)
    if count == 0:
        return out.reshape(grid.shape)

    weights = np.broadcast_to(np.asarray(weight, dtype=np.float64), (count,))
    offsets, radius = _stamp_offsets(std, grid)
    width = offsets.size
    norm = (2.0 * np.pi * std**2) ** (-0.5 * grid.d)
    chunk = max(1, STAMP_BUDGET // width**grid.d)

    for start in range(0, count, chunk):
        block = points[start : start + chunk]
        w = weights[start : start + chunk]
        base = np.rint((block + 0.5 * grid.L) / grid.h).astype(np.int64)

        values = norm * w.reshape((-1,) + (1,) * grid.d)
        r2 = np.zeros((block.shape[0],) + (1,) * grid.d)
        flat = np.zeros((block.shape[0],) + (1,) * grid.d, dtype=np.int64)
        for axis in range(grid.d):
            idx = base[:, axis : axis + 1] + offsets[None, :]
            nodes = -0.5 * grid.L + idx * grid.h
            dx = grid.minimum_image(nodes - block[:, axis : axis + 1])
            shape = [block.shape[0]] + [1] * grid.d
            shape[axis + 1] = width
            values = values * np.exp(-0.5 * dx**2 / std**2).reshape(shape)
            r2 = r2 + (dx**2).reshape(shape)
            flat = flat * grid.M + (idx % grid.M).reshape(shape)

        values = np.where(r2 <= radius**2, values, 0.0)
        flat = np.broadcast_to(flat, values.shape)
        out += np.bincount(flat.ravel(), weights=values.ravel(), minlength=out.size)

    return out.reshape(grid.shape)


def mollify_field(
    f: np.ndarray, which: KernelKind, family: MollifierFamily, grid: PeriodicGrid
) -> np.ndarray:
    """Spectral convolution of a gridded component with the kernel"""
    check_resolved(grid, family, which)
    _, abs_xi = wavenumbers(grid)
    return fourier_multiplier_apply(f, fourier_transform(abs_xi, family, which), grid)


@log_operation()
def mollify(
    mu: np.ndarray | Sequence[Sequence[float]],
    which: KernelKind,
    family: MollifierFamily,
    grid: PeriodicGrid,
    weight: float | np.ndarray | None = None,
) -> np.ndarray:
    """Convolve a point set or a gridded component with a family member.

    A point set has shape (count, d) and carries ``weight`` per point,
    1/N by default; an array of the grid's shape is treated as a field.
    """
    arr = np.asarray(mu, dtype=np.float64)
    if arr.shape == grid.shape:
        return mollify_field(arr, which, family, grid)

    check_resolved(grid, family, which)
    if weight is None:
        weight = 1.0 / family.N
    return deposit_points(arr, weight, kernel_std(family, which), grid)


@log_operation()
def mollifier_rate_check(
    f: np.ndarray,
    N_list: Iterable[int],
    scaling: ScalingParams,
    grid: PeriodicGrid,
) -> pd.DataFrame:
    """Columns ``N, kappa_hat_N, error, bound_scale, ratio`` with
    error = ||f * W_hat_N - f||_2 and bound_scale = ||grad f||_2 / kappa_hat_N.
    """
    grad_norm = l2_norm(gradient(f, grid), grid)
    rows = []
    for N in N_list:
        family = MollifierFamily.from_scaling(scaling.with_N(N))
        error = l2_norm(mollify_field(f, KernelKind.W_HAT_N, family, grid) - f, grid)
        bound = grad_norm / family.kappa_hat_N
        rows.append(
            {
                "N": N,
                "kappa_hat_N": family.kappa_hat_N,
                "error": error,
                "bound_scale": bound,
                "ratio": error / bound if bound > 0.0 else 0.0,
            }
        )
    columns = ["N", "kappa_hat_N", "error", "bound_scale", "ratio"]
    table = pd.DataFrame(rows, columns=columns)
    logger.info(
        "Mollifier rate check done",
        extra={"context": {"max_ratio": float(table["ratio"].max())}},
    )
    return table


def assumption_spot_check(
    xi_samples: np.ndarray | Sequence[float], d: int = 1, step: float = 1e-3
) -> AssumptionReport:
    """Check the Fourier-side conditions on W_1 at radial samples |xi|.

    The Laplacian of F(W_1) is taken by central differences along each axis.
    """
    radii = np.abs(np.asarray(xi_samples, dtype=np.float64))

    def ft(points: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * np.sum(points**2, axis=-1))

    points = np.zeros((radii.size, d))
    points[:, 0] = radii
    values = ft(points)
    # step shrinks with |xi| to keep the truncation error relative
    h = step / np.maximum(1.0, radii)
    laplacian = np.zeros_like(values)
    for axis in range(d):
        shift = np.zeros((radii.size, d))
        shift[:, axis] = h
        laplacian += (ft(points + shift) - 2.0 * values + ft(points - shift)) / h**2

    far = radii >= 2.0
    decay_ok = bool(np.all(np.abs(values[far]) <= np.exp(-radii[far]) * (1.0 + 1e-12)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(laplacian) / ((1.0 + radii**2) * np.abs(values))
    ratio = ratio[np.isfinite(ratio)]
    hessian_ratio = float(np.max(ratio, initial=0.0))

    return AssumptionReport(
        bounded=bool(np.max(np.abs(values), initial=0.0) <= 1.0)
        and bool(np.all(np.isfinite(laplacian))),
        sup_abs=float(np.max(np.abs(values), initial=0.0)),
        sup_laplacian=float(np.max(np.abs(laplacian), initial=0.0)),
        exponential_decay=decay_ok,
        hessian_growth=hessian_ratio <= max(1.0, float(d)) * (1.0 + 1e-3),
        hessian_ratio=hessian_ratio,
    )
