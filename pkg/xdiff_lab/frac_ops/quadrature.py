# xdiff_lab/frac_ops/quadrature.py
"""Principal-value fractional Laplacian of callables on R and R^2.

The singular integral is written in symmetric second-difference form,

    (-Delta)^a f(x) = c_{d,a} int_0^inf int_S D_r f(x, w) r^{-1-2a} dw dr,
    D_r f(x, w) = 2 f(x) - f(x + r w) - f(x - r w),

where the inner integral is absent in d = 1 and runs over half the unit
circle in d = 2. The gradient correction of the near-field integrand cancels
under this symmetrization, so both halves are integrated with the same kernel.
"""

from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from xdiff_lab.exceptions import ConfigError, QuadratureError
from xdiff_lab.frac_ops.models import QuadratureSettings, WeightRatioReport
from xdiff_lab.logger import LabLogger, log_operation

logger = LabLogger().get_logger(__name__)

NEAR_FIELD_CUTOFF = 1e-3


def c_d_alpha(d: int, alpha: float) -> float:
    """Normalization for which the symbol of (-Delta)^alpha is exactly |xi|^{2 alpha}"""
    return float(
        4.0**alpha
        * gamma(d / 2.0 + alpha)
        / (np.pi ** (d / 2.0) * abs(gamma(-alpha)))
    )


def _integrate(
    fn: Callable[[float], float], a: float, b: float, tol: float, what: str
) -> float:
    result: Any = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=200, full_output=1)
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3 and abserr > 10.0 * max(tol, tol * abs(value)):
        raise QuadratureError(
            f"Adaptive quadrature did not converge on {what} [{a:.6g}, {b:.6g}]: "
            f"{result[3]}",
            details={"abserr": abserr, "value": value},
        )
    return value


def _panel_edges(lo: float, hi: float, panel: float) -> np.ndarray:
    edges = np.concatenate(
        [np.geomspace(lo, hi, 8), np.arange(lo, hi, panel), [hi]]
    )
    return np.unique(edges)


def _second_difference(
    f: Callable[..., float], x: np.ndarray, d: int, tol: float
) -> Callable[[float], float]:
    """r -> 2 f(x) - f(x+rw) - f(x-rw), integrated over theta in [0, pi] when d = 2.

    w = (cos theta, sin theta). The angular integral is not normalized: w and -w
    give the same value, so it is half the integral over the whole circle.
    """
    if d == 1:
        fx = float(f(float(x[0])))
        x0 = float(x[0])
        return lambda r: 2.0 * fx - float(f(x0 + r)) - float(f(x0 - r))

    fx = float(f(x))

    def angular(r: float) -> float:
        def integrand(theta: float) -> float:
            w = np.array([np.cos(theta), np.sin(theta)])
            return 2.0 * fx - float(f(x + r * w)) - float(f(x - r * w))

        return _integrate(integrand, 0.0, np.pi, tol, "angular integral")

    return angular


@log_operation()
def pv_frac_laplacian_point(
    f: Callable[..., float],
    x: float | Sequence[float],
    alpha: float,
    r_split: float = 1.0,
    tail_R: float = 1e3,
    quad_tol: float = 1e-10,
    d: int = 1,
    panel: float = 4.0,
) -> float:
    """(-Delta)^alpha f(x) by adaptive quadrature of the principal-value integral.

    In d = 1 ``f`` takes a float; in d = 2 it takes a length-2 array. The
    radial integral is truncated at ``tail_R``; the innermost
    ``1e-3 * r_split`` is integrated analytically from the quadratic
    behaviour of the second difference.
    """
    settings = QuadratureSettings(
        r_split=r_split, tail_R=tail_R, quad_tol=quad_tol, panel=panel
    )
    if d not in (1, 2):
        raise ConfigError(f"Principal-value quadrature supports d in (1, 2), got {d}")
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if settings.tail_R <= settings.r_split:
        raise ConfigError("tail_R must exceed r_split")

    point = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if point.shape != (d,):
        raise ConfigError(f"Point {x!r} is not {d}-dimensional")

    second = _second_difference(f, point, d, settings.quad_tol)
    exponent = -1.0 - 2.0 * alpha

    def kernel(r: float) -> float:
        return second(r) * r**exponent

    eps = NEAR_FIELD_CUTOFF * settings.r_split
    # second(r) ~ C r^2 below eps
    total = second(eps) / eps**2 * eps ** (2.0 - 2.0 * alpha) / (2.0 - 2.0 * alpha)

    near_edges = np.geomspace(eps, settings.r_split, 7)
    for a, b in zip(near_edges[:-1], near_edges[1:], strict=True):
        total += _integrate(kernel, float(a), float(b), settings.quad_tol, "near field")

    far_edges = _panel_edges(settings.r_split, settings.tail_R, settings.panel)
    for a, b in zip(far_edges[:-1], far_edges[1:], strict=True):
        total += _integrate(kernel, float(a), float(b), settings.quad_tol, "far field")

    return c_d_alpha(d, alpha) * total


def log_weight(x: np.ndarray) -> np.ndarray:
    """psi(x) = log(2 + |x|^2) on points whose coordinates run along the last axis"""
    x = np.asarray(x, dtype=np.float64)
    return np.log(2.0 + np.sum(x**2, axis=-1))


@log_operation()
def log_weight_ratio_check(
    x_samples: Sequence[float],
    alpha: float,
    d: int = 1,
    r_split: float = 1.0,
    tail_R: float = 1e3,
    quad_tol: float = 1e-10,
) -> WeightRatioReport:
    """Bound constants of |(-Delta)^alpha psi| / psi and |grad psi| / psi.

    Samples are radii placed along the first axis.
    """
    if d == 1:

        def psi(y: float) -> float:
            return float(np.log(2.0 + y * y))

    else:

        def psi(y: np.ndarray) -> float:  # type: ignore[misc]
            return float(np.log(2.0 + float(np.dot(y, y))))

    lap_ratio: list[float] = []
    grad_ratio: list[float] = []
    for r in x_samples:
        point = [float(r)] + [0.0] * (d - 1)
        value = pv_frac_laplacian_point(
            psi,
            point if d > 1 else float(r),
            alpha,
            r_split=r_split,
            tail_R=tail_R,
            quad_tol=quad_tol,
            d=d,
        )
        psi_r = float(np.log(2.0 + r * r))
        lap_ratio.append(abs(value) / psi_r)
        grad_ratio.append(2.0 * abs(r) / ((2.0 + r * r) * psi_r))
        logger.debug(
            "Weight ratio sample",
            extra={"context": {"x": r, "laplacian_ratio": lap_ratio[-1]}},
        )

    return WeightRatioReport(
        alpha=alpha,
        x=[float(r) for r in x_samples],
        laplacian_ratio=lap_ratio,
        gradient_ratio=grad_ratio,
        laplacian_constant=max(lap_ratio),
        gradient_constant=max(grad_ratio),
    )
