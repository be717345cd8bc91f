# xdiff_lab/levy/sampler.py
"""Rejection-free samplers of isotropic 2 alpha-stable increments.

d = 1 uses the symmetric Chambers-Mallows-Stuck formula of index 2 alpha;
d >= 2 subordinates a Gaussian to a positive alpha-stable clock.
"""

import numpy as np

from xdiff_lab.levy.models import RngStream, StableParams
from xdiff_lab.logger import LabLogger

logger = LabLogger().get_logger(__name__)


def symmetric_stable(
    index: float, scale: float, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Symmetric stable variables with E exp(i xi X) = exp(-scale |xi|^index)"""
    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
    w = rng.exponential(1.0, size)
    x = (
        np.sin(index * v)
        / np.cos(v) ** (1.0 / index)
        * (np.cos((1.0 - index) * v) / w) ** ((1.0 - index) / index)
    )
    return scale ** (1.0 / index) * x


def positive_stable(
    alpha: float, scale: float, rng: np.random.Generator, size: int
) -> np.ndarray:
    """One-sided stable variables: E exp(-lam S) = exp(-scale lam^alpha), alpha < 1"""
    u = rng.uniform(0.0, np.pi, size)
    w = rng.exponential(1.0, size)
    s = (
        np.sin(alpha * u)
        / np.sin(u) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )
    return scale ** (1.0 / alpha) * s


def apply_jump_cap(increments: np.ndarray, cap: float) -> tuple[np.ndarray, int]:
    """Shrink increments longer than ``cap`` onto the cap; return the capped count"""
    norms = np.sqrt(np.sum(increments**2, axis=-1))
    over = norms > cap
    if not np.any(over):
        return increments, 0
    factor = np.where(over, cap / np.where(over, norms, 1.0), 1.0)
    return increments * factor[..., None], int(np.count_nonzero(over))


def draw_increments(
    p: StableParams, stream: RngStream, count: int
) -> tuple[np.ndarray, int]:
    """``count`` increments of shape (count, d) and the number of capped jumps"""
    rng = stream.generator()
    if p.d == 1:
        increments = symmetric_stable(p.index, p.scale, rng, count)[:, None]
    else:
        clock = positive_stable(p.alpha, p.scale, rng, count)
        z = rng.standard_normal((count, p.d))
        increments = np.sqrt(2.0 * clock)[:, None] * z

    if p.jump_cap is None:
        return increments, 0
    capped, n_capped = apply_jump_cap(increments, p.jump_cap)
    if n_capped:
        logger.debug(
            "Capped stable jumps",
            extra={"context": {"count": n_capped, "cap": p.jump_cap}},
        )
    return capped, n_capped


def sample_increments(p: StableParams, stream: RngStream, count: int) -> np.ndarray:
    """Block of ``count`` increments; row k is lane k of the substream"""
    return draw_increments(p, stream, count)[0]


def sample_increment(p: StableParams, stream: RngStream) -> np.ndarray:
    """Single d-vector increment"""
    return sample_increments(p, stream, 1)[0]
