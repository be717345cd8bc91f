# xdiff_lab/particles/diagnostics.py
from collections.abc import Callable, Sequence

import numpy as np
import pandas as pd

from xdiff_lab.exceptions import ConfigError
from xdiff_lab.frac_ops.grid import Field
from xdiff_lab.frac_ops.operators import frac_laplacian, gradient, l2_norm
from xdiff_lab.kernels.force import build_force_table
from xdiff_lab.kernels.models import MollifierFamily
from xdiff_lab.levy.models import RngStream, StreamPurpose
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.params.models import ModelParams, ScalingParams
from xdiff_lab.particles.dynamics import (
    deposit_h,
    init_from_density,
    interpolate_periodic,
)
from xdiff_lab.particles.models import (
    GeneratorCheckResult,
    ParticleEnsemble,
    ParticleRun,
)

logger = LabLogger().get_logger(__name__)


@log_operation()
def generator_check(
    runs: Sequence[ParticleRun],
    psi: Callable[..., np.ndarray],
    model: ModelParams,
    species: int = 0,
) -> GeneratorCheckResult:
    """Both sides of the weak Ito identity for species ``species``.

    lhs = <S(T), psi> - <S(0), psi>; rhs is the left-endpoint quadrature of
    <S, F . grad psi> - sigma <S, (-Delta)^alpha psi> over the recorded steps.
    ``psi`` takes d coordinate arrays and must be periodic on the torus; its
    derivatives are taken spectrally and interpolated at the particles.
    """
    if not runs:
        raise ConfigError("generator_check needs at least one run")
    grid = runs[0].initial.grid
    psi_grid = np.broadcast_to(psi(*grid.mesh()), grid.shape).astype(np.float64)
    grad_psi = gradient(psi_grid, grid)
    lap_psi = frac_laplacian(psi_grid, model.alpha, grid)
    sigma = model.sigma[species]

    def psi_at(x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(psi(*x.T), x.shape[:1]).astype(np.float64)

    lhs_values, rhs_values = [], []
    for run in runs:
        if len(run.step_positions) == 0 and len(run.records) > 0:
            raise ConfigError(
                "generator_check needs runs simulated with record_steps"
            )
        weight = run.initial.weight
        start = run.initial.positions[species]
        end = run.final.positions[species]
        lhs = weight * float(np.sum(psi_at(end)) - np.sum(psi_at(start)))

        rhs = 0.0
        steps = zip(run.step_positions, run.step_forces, strict=True)
        for positions, forces in steps:
            x = positions[species]
            transport = sum(
                forces[species][:, axis]
                * interpolate_periodic(grad_psi[axis], x, grid)
                for axis in range(grid.d)
            )
            diffusion = sigma * interpolate_periodic(lap_psi, x, grid)
            rhs += run.dt * weight * float(np.sum(transport - diffusion))

        lhs_values.append(lhs)
        rhs_values.append(rhs)

    lhs_arr = np.asarray(lhs_values)
    rhs_arr = np.asarray(rhs_values)
    residual = lhs_arr - rhs_arr
    stderr = (
        float(np.std(residual, ddof=1) / np.sqrt(residual.size))
        if residual.size > 1
        else 0.0
    )
    return GeneratorCheckResult(
        lhs=float(np.mean(lhs_arr)),
        rhs=float(np.mean(rhs_arr)),
        residual=float(np.mean(residual)),
        stderr=stderr,
        runs=len(runs),
    )


def force_at(
    probe: np.ndarray,
    ensemble: ParticleEnsemble,
    model: ModelParams,
    family: MollifierFamily,
    species: int = 0,
) -> np.ndarray:
    """-sum_j a_ij (1/N) sum_l grad^beta V_hat_N(x - X_j^l) at one probe point"""
    table = build_force_table(family, model.beta, ensemble.grid)
    probe = np.asarray(probe, dtype=np.float64).reshape(1, -1)
    total = np.zeros(ensemble.d)
    for j, sources in enumerate(ensemble.positions):
        a_ij = model.a[species][j]
        if a_ij == 0.0 or sources.shape[0] == 0:
            continue
        dx = ensemble.grid.minimum_image(probe - sources)
        total -= a_ij * ensemble.weight * table.force(dx).sum(axis=0)
    return total


@log_operation()
def empirical_force_variance(
    model: ModelParams,
    scalings: Sequence[ScalingParams],
    seeds: Sequence[int],
    u0: Field,
    probe: Sequence[float] | np.ndarray,
    species: int = 0,
    counts: Callable[[int], Sequence[int]] | None = None,
) -> pd.DataFrame:
    """Across-seed variance of the force on ``species`` at a fixed probe point.

    Particles are drawn i.i.d. from ``u0`` at t = 0. Columns
    ``N, kappa_N, variance, mean_force, seeds``; in d >= 2 the variance is
    the trace of the covariance.
    """
    rows = []
    probe_arr = np.asarray(probe, dtype=np.float64)
    for scaling in scalings:
        family = MollifierFamily.from_scaling(scaling)
        samples = []
        for seed in seeds:
            stream = RngStream(master_seed=seed, purpose=StreamPurpose.VARIANCE)
            ensemble = init_from_density(
                u0,
                scaling.N,
                stream,
                counts=counts(scaling.N) if counts is not None else None,
            )
            samples.append(force_at(probe_arr, ensemble, model, family, species))
        forces = np.asarray(samples)
        variance = (
            float(np.sum(np.var(forces, axis=0, ddof=1))) if len(seeds) > 1 else 0.0
        )
        rows.append(
            {
                "N": scaling.N,
                "kappa_N": family.kappa_N,
                "variance": variance,
                "mean_force": float(np.linalg.norm(np.mean(forces, axis=0))),
                "seeds": len(seeds),
            }
        )
        logger.debug(
            "Force variance", extra={"context": {"N": scaling.N, "variance": variance}}
        )
    return pd.DataFrame(
        rows, columns=["N", "kappa_N", "variance", "mean_force", "seeds"]
    )


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x over the positive entries"""
    x_arr = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(y, dtype=np.float64)
    keep = (x_arr > 0.0) & (y_arr > 0.0)
    if np.count_nonzero(keep) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x_arr[keep]), np.log(y_arr[keep]), 1)
    return float(slope)


def initial_condition_gap(
    ensemble: ParticleEnsemble,
    u0: Field,
    family: MollifierFamily,
    delta_N: float,
    rho: float,
) -> tuple[float, bool]:
    """||h^N(0) - u0||_2^2 and whether it reaches delta_N^{1+rho}"""
    gap = l2_norm(deposit_h(ensemble, family) - u0) ** 2
    return gap, gap >= delta_N ** (1.0 + rho)
