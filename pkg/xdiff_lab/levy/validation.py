# xdiff_lab/levy/validation.py
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from xdiff_lab.levy.models import RngStream, StableParams, StreamPurpose
from xdiff_lab.levy.sampler import sample_increments
from xdiff_lab.logger import LabLogger, log_operation

logger = LabLogger().get_logger(__name__)

MIN_SAMPLES = 1000


@dataclass(frozen=True)
class CharFunctionEstimate:
    """Real part, its standard error and the imaginary part (expected 0) per xi"""

    xi: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    imag: np.ndarray


def empirical_char_function(
    samples: np.ndarray, xi_grid: Sequence[float] | np.ndarray
) -> CharFunctionEstimate:
    """(1/M) sum cos(xi . X_m) with standard errors.

    For vector samples a scalar ``xi`` is taken along the first axis.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] < MIN_SAMPLES:
        logger.warning(
            f"Characteristic function from {samples.shape[0]} samples "
            f"(fewer than {MIN_SAMPLES})"
        )
    xi = np.asarray(xi_grid, dtype=np.float64)
    xi_vectors = xi.reshape(-1, 1) if xi.ndim <= 1 else xi
    if xi_vectors.shape[1] != samples.shape[1]:
        padded = np.zeros((xi_vectors.shape[0], samples.shape[1]))
        padded[:, 0] = xi_vectors[:, 0]
        xi_vectors = padded

    values, stderr, imag = [], [], []
    m = samples.shape[0]
    for vector in xi_vectors:
        phase = samples @ vector
        cos = np.cos(phase)
        values.append(float(np.mean(cos)))
        stderr.append(float(np.std(cos, ddof=1) / np.sqrt(m)) if m > 1 else 0.0)
        imag.append(float(np.mean(np.sin(phase))))

    return CharFunctionEstimate(
        xi=xi.reshape(-1) if xi.ndim <= 1 else np.linalg.norm(xi, axis=1),
        values=np.asarray(values),
        stderr=np.asarray(stderr),
        imag=np.asarray(imag),
    )


def tail_slope(
    samples: np.ndarray,
    r_lo: float | None = None,
    r_hi: float | None = None,
    points: int = 20,
) -> float:
    """Log-log slope of the empirical survival function P(|X| > r) on [r_lo, r_hi].

    By default the window is one decade starting at the 99.9% quantile of |X|,
    far enough out that the second term of the tail expansion is negligible.
    """
    samples = np.asarray(samples, dtype=np.float64)
    norms = np.abs(samples) if samples.ndim == 1 else np.linalg.norm(samples, axis=-1)
    norms = np.sort(norms)
    if r_lo is None:
        r_lo = float(np.quantile(norms, 0.999))
    if r_hi is None:
        r_hi = 10.0 * r_lo
    r = np.geomspace(r_lo, r_hi, points)
    survival = 1.0 - np.searchsorted(norms, r, side="right") / norms.size
    keep = survival > 0.0
    slope, _ = np.polyfit(np.log(r[keep]), np.log(survival[keep]), 1)
    return float(slope)


@log_operation()
def validate_sampler(
    params: StableParams,
    xi: Sequence[float],
    count: int,
    stream: RngStream,
) -> pd.DataFrame:
    """Columns ``xi,target,empirical,stderr`` for one block of increments"""
    samples = sample_increments(params, stream.at(purpose=StreamPurpose.SAMPLER), count)
    estimate = empirical_char_function(samples, xi)
    return pd.DataFrame(
        {
            "xi": estimate.xi,
            "target": params.target_char_function(estimate.xi),
            "empirical": estimate.values,
            "stderr": estimate.stderr,
        }
    )


@log_operation()
def semigroup_check(
    params: StableParams,
    k: int,
    stream: RngStream,
    count: int,
    xi: Sequence[float],
) -> pd.DataFrame:
    """Sum of ``k`` increments of step dt against one increment of step k dt.

    Columns ``xi,target,summed,summed_stderr,single,single_stderr``.
    """
    base = stream.at(purpose=StreamPurpose.SEMIGROUP)
    total = np.zeros((count, params.d))
    for step in range(k):
        total += sample_increments(params, base.at(step=step), count)
    single = sample_increments(params.with_dt(k * params.dt), base.at(step=k), count)

    summed_cf = empirical_char_function(total, xi)
    single_cf = empirical_char_function(single, xi)
    return pd.DataFrame(
        {
            "xi": summed_cf.xi,
            "target": params.with_dt(k * params.dt).target_char_function(summed_cf.xi),
            "summed": summed_cf.values,
            "summed_stderr": summed_cf.stderr,
            "single": single_cf.values,
            "single_stderr": single_cf.stderr,
        }
    )
