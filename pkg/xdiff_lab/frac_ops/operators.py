# xdiff_lab/frac_ops/operators.py
"""Fourier-multiplier operators on the periodic grid.

All operators act on the trailing ``d`` axes of their input, so a single
species component, a stacked ``(n, M, ..., M)`` array or a :class:`Field`
are all accepted. Zero modes of singular symbols are set to 0.
"""

from threading import RLock

import numpy as np
import scipy.fft
from cachetools import LRUCache, cached
from cachetools.keys import hashkey

from xdiff_lab.exceptions import ConfigError, FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid, nyquist_mask, wavenumbers

IMAG_TOLERANCE = 1e-10


def _as_array(f: Field | np.ndarray) -> np.ndarray:
    values = f.values if isinstance(f, Field) else np.asarray(f)
    if not np.all(np.isfinite(values)):
        raise FieldError("Operator input contains non-finite values")
    return values


def to_spectral(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return scipy.fft.fftn(f, axes=grid.axes)


def from_spectral(f_hat: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """Inverse transform, checking that the imaginary residue is negligible"""
    out = scipy.fft.ifftn(f_hat, axes=grid.axes)
    scale = max(float(np.max(np.abs(out.real), initial=0.0)), 1.0)
    if float(np.max(np.abs(out.imag), initial=0.0)) > IMAG_TOLERANCE * scale:
        raise FieldError("Inverse transform left a non-negligible imaginary part")
    return np.ascontiguousarray(out.real)


def power_symbol(grid: PeriodicGrid, exponent: float) -> np.ndarray:
    """|xi|^exponent with the zero mode set to 0"""
    _, abs_xi = wavenumbers(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        symbol = np.where(abs_xi > 0.0, abs_xi**exponent, 0.0)
    return symbol


def fourier_multiplier_apply(
    f: Field | np.ndarray, symbol: np.ndarray, grid: PeriodicGrid
) -> np.ndarray:
    """Multiply the Fourier coefficients of ``f`` by ``symbol``"""
    values = _as_array(f)
    return from_spectral(to_spectral(values, grid) * symbol, grid)


def frac_laplacian(f: Field | np.ndarray, s: float, grid: PeriodicGrid) -> np.ndarray:
    """(-Delta)^s f via the symbol |xi|^{2s}"""
    if s <= 0.0:
        raise ConfigError(f"frac_laplacian needs s > 0, got {s}")
    return fourier_multiplier_apply(f, power_symbol(grid, 2.0 * s), grid)


def gradient_symbols(grid: PeriodicGrid, exponent: float = 0.0) -> list[np.ndarray]:
    """i xi_l |xi|^exponent per axis, vanishing at the zero and Nyquist modes"""
    xi, _ = wavenumbers(grid)
    radial = power_symbol(grid, exponent) if exponent != 0.0 else 1.0
    keep = nyquist_mask(grid)
    return [np.where(keep, 1j * xi_l * radial, 0.0) for xi_l in xi]


def frac_gradient(
    f: Field | np.ndarray, beta: float, grid: PeriodicGrid
) -> np.ndarray:
    """Riesz fractional gradient, one output component per axis (leading axis)"""
    if not 0.0 < beta <= 1.0:
        raise ConfigError(f"frac_gradient needs 0 < beta <= 1, got {beta}")
    values = _as_array(f)
    f_hat = to_spectral(values, grid)
    return np.stack(
        [
            from_spectral(f_hat * symbol, grid)
            for symbol in gradient_symbols(grid, beta - 1.0)
        ]
    )


def gradient(f: Field | np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return frac_gradient(f, 1.0, grid)


def divergence(v: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """Spectral divergence of a vector field whose components lead the array"""
    values = _as_array(v)
    if values.shape[0] != grid.d:
        raise FieldError(f"Expected {grid.d} vector components, got {values.shape[0]}")
    total = sum(
        to_spectral(values[axis], grid) * symbol
        for axis, symbol in enumerate(gradient_symbols(grid))
    )
    return from_spectral(total, grid)


def riesz_potential(
    f: Field | np.ndarray, kappa: float, grid: PeriodicGrid
) -> np.ndarray:
    """(-Delta)^{-kappa} f via |xi|^{-2 kappa}; the mean of ``f`` is discarded"""
    if kappa <= 0.0:
        raise ConfigError(f"riesz_potential needs kappa > 0, got {kappa}")
    if not grid.d > 2.0 * kappa:
        raise ConfigError(
            f"riesz_potential needs d > 2 kappa (d={grid.d}, kappa={kappa})"
        )
    return fourier_multiplier_apply(f, power_symbol(grid, -2.0 * kappa), grid)


def spectral_energy(
    f: Field | np.ndarray, grid: PeriodicGrid, weight: np.ndarray | float = 1.0
) -> float:
    """L^d / M^{2d} sum |f_hat|^2 weight, the Parseval form of int |f|^2"""
    values = _as_array(f)
    f_hat = to_spectral(values, grid)
    total = float(np.sum(np.abs(f_hat) ** 2 * weight))
    return total * grid.volume / float(grid.M) ** (2 * grid.d)


def l2_norm(f: Field | np.ndarray, grid: PeriodicGrid | None = None) -> float:
    """Root of h^d sum |f|^2; stacked species are summed"""
    if isinstance(f, Field):
        grid = f.grid
    if grid is None:
        raise ConfigError("l2_norm of a bare array needs its grid")
    values = _as_array(f)
    return float(np.sqrt(grid.cell_volume * np.sum(values**2)))


def h_alpha_seminorm(
    f: Field | np.ndarray, alpha: float, grid: PeriodicGrid
) -> float:
    """||(-Delta)^{alpha/2} f||_2 from the spectral side.

    This is the Fourier representative of the Gagliardo seminorm; the two
    differ by a dimensional constant.
    """
    return float(np.sqrt(spectral_energy(f, grid, power_symbol(grid, 2.0 * alpha))))


def sobolev_proxy_norm(f: Field | np.ndarray, s: float, grid: PeriodicGrid) -> float:
    """(sum (1 + |xi|^2)^s |f_hat|^2)^{1/2} with Parseval scaling"""
    _, abs_xi = wavenumbers(grid)
    return float(np.sqrt(spectral_energy(f, grid, (1.0 + abs_xi**2) ** s)))


@cached(
    cache=LRUCache(maxsize=32),
    key=lambda grid: hashkey(grid.d, grid.L, grid.M),
    lock=RLock(),
)
def dealias_mask(grid: PeriodicGrid) -> np.ndarray:
    """2/3-rule mask: keep integer wavenumbers |k| < M/3 on every axis"""
    k = np.abs(np.fft.fftfreq(grid.M, d=1.0 / grid.M))
    keep_1d = k < grid.M / 3.0
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.d):
        shape = [1] * grid.d
        shape[axis] = grid.M
        mask = mask & keep_1d.reshape(shape)
    mask.setflags(write=False)
    return mask


def dealias(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return from_spectral(to_spectral(f, grid) * dealias_mask(grid), grid)


def lp_norm(f: np.ndarray, p: float, grid: PeriodicGrid) -> float:
    return float((grid.cell_volume * np.sum(np.abs(f) ** p)) ** (1.0 / p))


def riesz_lp_check(
    f: np.ndarray, kappa: float, p: float, grid: PeriodicGrid
) -> float:
    """||(-Delta)^{-kappa} f||_q / ||f||_p with q = dp / (d - 2 kappa p).

    ``f`` should have zero mean; the ratio stays bounded for p < d / (2 kappa).
    """
    d = grid.d
    if not 1.0 < p < d / (2.0 * kappa):
        raise ConfigError(f"Riesz estimate needs 1 < p < d/(2 kappa), got p={p}")
    q = d * p / (d - 2.0 * kappa * p)
    return lp_norm(riesz_potential(f, kappa, grid), q, grid) / lp_norm(f, p, grid)


def gagliardo_nirenberg_check(
    f: np.ndarray, s1: float, s2: float, theta: float, grid: PeriodicGrid
) -> float:
    """||f||_{H^s} / (||f||_{H^s1}^theta ||f||_{H^s2}^(1-theta)).

    The order is s = theta s1 + (1-theta) s2. With p = 2 the ratio is at most 1
    by Hoelder on the spectral side.
    """
    if not 0.0 <= theta <= 1.0:
        raise ConfigError(f"theta must lie in [0, 1], got {theta}")
    s = theta * s1 + (1.0 - theta) * s2
    numerator = sobolev_proxy_norm(f, s, grid)
    denominator = sobolev_proxy_norm(f, s1, grid) ** theta * sobolev_proxy_norm(
        f, s2, grid
    ) ** (1.0 - theta)
    if denominator == 0.0:
        return 0.0
    return numerator / denominator
