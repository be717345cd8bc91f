# xdiff_lab/particles/dynamics.py
from collections.abc import Sequence
from typing import Literal

import numpy as np
from scipy.ndimage import map_coordinates

from xdiff_lab.exceptions import ConfigError, FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid
from xdiff_lab.frac_ops.operators import frac_gradient
from xdiff_lab.kernels.force import build_force_table
from xdiff_lab.kernels.models import ForceTable, KernelKind, MollifierFamily
from xdiff_lab.kernels.mollifier import (
    check_resolved,
    deposit_points,
    kernel_std,
    mollify,
)
from xdiff_lab.levy.models import RngStream, StableParams, StreamPurpose
from xdiff_lab.levy.sampler import draw_increments
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.params.models import ModelParams
from xdiff_lab.particles.models import ParticleEnsemble, ParticleRun, StepRecord

logger = LabLogger().get_logger(__name__)

# Upper bound on pair displacements materialized per chunk in drift_direct
PAIR_BUDGET = 2**22


@log_operation()
def init_from_density(
    u0: Field,
    N: int,
    stream: RngStream,
    counts: Sequence[int] | None = None,
) -> ParticleEnsemble:
    """i.i.d. draws per species from u0_i / ||u0_i||_1.

    Cells are chosen by inverse CDF over the flattened grid and positions are
    jittered uniformly within the chosen cell. ``counts`` defaults to
    round(N * mass_i).
    """
    grid = u0.grid
    if np.any(u0.values < 0.0):
        raise FieldError("Initial density has negative values")
    masses = [float(np.sum(u0.component(i)) * grid.cell_volume) for i in range(u0.n)]
    if any(m <= 0.0 for m in masses):
        raise FieldError(f"Every species needs positive mass, got {masses}")
    if counts is None:
        counts = [int(round(N * m)) for m in masses]
    if len(counts) != u0.n:
        raise FieldError(f"Expected {u0.n} species counts, got {len(counts)}")

    nodes = grid.nodes()
    positions = []
    for i, count in enumerate(counts):
        rng = stream.at(purpose=StreamPurpose.INIT, species=i).generator()
        cdf = np.cumsum(u0.component(i).ravel())
        cells = np.searchsorted(cdf, rng.uniform(0.0, cdf[-1], count), side="right")
        cells = np.minimum(cells, cdf.size - 1)
        index = np.stack(np.unravel_index(cells, grid.shape), axis=-1)
        jitter = rng.uniform(-0.5, 0.5, (count, grid.d)) * grid.h
        positions.append(grid.wrap(nodes[index] + jitter))

    ensemble = ParticleEnsemble(grid, N, tuple(positions))
    logger.debug(
        "Initialized particles",
        extra={"context": {"N": N, "counts": ensemble.counts, "masses": masses}},
    )
    return ensemble


def canonical_order(ensemble: ParticleEnsemble) -> ParticleEnsemble:
    """Sort each species by position (lexicographic, first axis major)"""
    ordered = []
    for x in ensemble.positions:
        keys = tuple(x[:, axis] for axis in reversed(range(x.shape[1])))
        ordered.append(x[np.lexsort(keys)] if x.shape[0] else x)
    return ensemble.with_positions(ordered)


def _interaction_free(model: ModelParams) -> bool:
    return not np.any(np.asarray(model.a, dtype=np.float64))


@log_operation()
def drift_direct(
    e: ParticleEnsemble, model: ModelParams, table: ForceTable
) -> list[np.ndarray]:
    """Pairwise forces -sum_j a_ij (1/N) sum_l grad^beta V_hat_N(X_i^k - X_j^l).

    Distances use the minimum image; the self pair contributes 0.
    """
    grid = e.grid
    forces = [np.zeros_like(x) for x in e.positions]
    if _interaction_free(model):
        return forces

    for i, targets in enumerate(e.positions):
        for j, sources in enumerate(e.positions):
            a_ij = model.a[i][j]
            if a_ij == 0.0 or targets.shape[0] == 0 or sources.shape[0] == 0:
                continue
            chunk = max(1, PAIR_BUDGET // (sources.shape[0] * grid.d))
            for start in range(0, targets.shape[0], chunk):
                block = targets[start : start + chunk]
                dx = grid.minimum_image(block[:, None, :] - sources[None, :, :])
                forces[i][start : start + chunk] -= (
                    a_ij * e.weight * table.force(dx).sum(axis=1)
                )
    return forces


def interpolate_periodic(
    values: np.ndarray, points: np.ndarray, grid: PeriodicGrid
) -> np.ndarray:
    """Periodic cubic-spline interpolation of a gridded component at points (m, d)"""
    if points.shape[0] == 0:
        return np.zeros(0)
    coordinates = ((points + 0.5 * grid.L) / grid.h).T
    return map_coordinates(values, coordinates, order=3, mode="grid-wrap")


@log_operation()
def drift_grid(
    e: ParticleEnsemble,
    grid: PeriodicGrid,
    model: ModelParams,
    family: MollifierFamily,
) -> list[np.ndarray]:
    """Forces -sum_j a_ij grad^beta s_hat_j^N at the particles.

    s_hat_j^N = S_j^N * V_hat_N is deposited on the grid, the fractional
    gradient is applied spectrally and the result is interpolated.
    """
    forces = [np.zeros_like(x) for x in e.positions]
    if _interaction_free(model) or sum(e.counts) == 0:
        return forces
    check_resolved(grid, family, KernelKind.W_N)

    std = kernel_std(family, KernelKind.V_HAT_N)
    gradients = [
        frac_gradient(deposit_points(x, e.weight, std, grid), model.beta, grid)
        for x in e.positions
    ]
    for i, targets in enumerate(e.positions):
        if targets.shape[0] == 0:
            continue
        field_i = np.zeros((grid.d, *grid.shape))
        for j, grad_j in enumerate(gradients):
            field_i -= model.a[i][j] * grad_j
        forces[i] = np.stack(
            [
                interpolate_periodic(field_i[axis], targets, grid)
                for axis in range(grid.d)
            ],
            axis=-1,
        )
    return forces


def compute_drift(
    e: ParticleEnsemble,
    model: ModelParams,
    family: MollifierFamily,
    drift: Literal["grid", "direct"] = "grid",
    table: ForceTable | None = None,
) -> list[np.ndarray]:
    if drift == "direct":
        if table is None:
            table = build_force_table(family, model.beta, e.grid)
        return drift_direct(e, model, table)
    return drift_grid(e, e.grid, model, family)


def deposit_h(e: ParticleEnsemble, family: MollifierFamily) -> Field:
    """h_i^N = S_i^N * W_N on the ensemble's grid"""
    return Field(
        e.grid,
        np.stack(
            [mollify(x, KernelKind.W_N, family, e.grid, e.weight) for x in e.positions]
        ),
    )


def deposit_s_hat(e: ParticleEnsemble, family: MollifierFamily) -> Field:
    """s_hat_i^N = S_i^N * V_hat_N on the ensemble's grid"""
    return Field(
        e.grid,
        np.stack(
            [
                mollify(x, KernelKind.V_HAT_N, family, e.grid, e.weight)
                for x in e.positions
            ]
        ),
    )


def em_step(
    e: ParticleEnsemble,
    dt: float,
    model: ModelParams,
    stream: RngStream,
    forces: list[np.ndarray],
    step: int = 0,
    time: float = 0.0,
    jump_cap: float | None = None,
    large_jump: float = np.inf,
    noise: bool = True,
) -> tuple[ParticleEnsemble, StepRecord]:
    """X <- wrap(X + F dt + dL) with dL from the (species, step) substream.

    ``time`` is the time at the start of the step.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")

    new_positions = []
    max_displacement = []
    large_jumps = []
    capped = 0
    for i, x in enumerate(e.positions):
        displacement = forces[i] * dt
        if noise and x.shape[0]:
            params = StableParams(
                alpha=model.alpha,
                d=e.d,
                sigma=model.sigma[i],
                dt=dt,
                jump_cap=jump_cap,
            )
            increments, n_capped = draw_increments(
                params,
                stream.at(purpose=StreamPurpose.NOISE, species=i, step=step),
                x.shape[0],
            )
            capped += n_capped
            jumps = np.sqrt(np.sum(increments**2, axis=-1))
            large_jumps.append(int(np.count_nonzero(jumps > large_jump)))
            displacement = displacement + increments
        else:
            large_jumps.append(0)
        lengths = np.sqrt(np.sum(displacement**2, axis=-1))
        max_displacement.append(float(np.max(lengths, initial=0.0)))
        new_positions.append(e.grid.wrap(x + displacement))

    record = StepRecord(
        time=time + dt,
        max_displacement=max_displacement,
        large_jumps=large_jumps,
        capped_jumps=capped,
    )
    return e.with_positions(new_positions), record


def _snapshot_steps(
    snapshot_times: Sequence[float], dt: float, n_steps: int
) -> dict[int, float]:
    steps: dict[int, float] = {}
    for t in snapshot_times:
        k = int(round(t / dt))
        if not 0 <= k <= n_steps:
            raise ConfigError(f"Snapshot time {t} outside [0, {n_steps * dt}]")
        steps[k] = t
    return steps


@log_operation()
def simulate(
    ensemble: ParticleEnsemble,
    model: ModelParams,
    family: MollifierFamily,
    dt: float,
    T: float,
    stream: RngStream,
    snapshot_times: Sequence[float],
    drift: Literal["grid", "direct"] = "grid",
    jump_cap: float | None = None,
    record_steps: bool = False,
) -> ParticleRun:
    """Euler-Maruyama run from ``ensemble`` up to T.

    The ensemble is put in canonical order first, so noise lanes follow the
    sorted initial positions.
    """
    n_steps = int(round(T / dt))
    snapshots = _snapshot_steps(snapshot_times, dt, n_steps)
    table = (
        build_force_table(family, model.beta, ensemble.grid)
        if drift == "direct" and not _interaction_free(model)
        else None
    )
    half_width = 0.5 * kernel_std(family, KernelKind.W_N)

    run = ParticleRun(dt=dt)
    current = canonical_order(ensemble)
    for step in range(n_steps + 1):
        if step in snapshots:
            run.times.append(snapshots[step])
            run.snapshots.append(current)
            run.fields.append(deposit_h(current, family))
        if step == n_steps:
            break

        forces = compute_drift(current, model, family, drift, table)
        if record_steps:
            run.step_positions.append(current.positions)
            run.step_forces.append(forces)
        current, record = em_step(
            current,
            dt,
            model,
            stream,
            forces,
            step=step,
            time=step * dt,
            jump_cap=jump_cap,
            large_jump=half_width,
        )
        run.records.append(record)

    if run.capped_jumps:
        logger.warning(
            f"Jump cap {jump_cap} shortened {run.capped_jumps} increments; "
            "the noise is no longer exactly stable"
        )
    logger.debug(
        "Particle run done",
        extra={"context": {"N": ensemble.N, "steps": n_steps, "drift": drift}},
    )
    return run
