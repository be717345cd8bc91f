# xdiff_lab/pde/solver.py
"""Pseudo-spectral solver for the fractional cross-diffusion systems.

Both systems read

    d_t u_i = -sigma_i (-Delta)^alpha u_i + div(u_i sum_j a_ij grad^beta v_j)

with v_j = u_j * W_hat_N for the regularized system and v_j = u_j in the
limit. The diffusion is absorbed by an integrating factor and the transport
term is advanced with Heun's method (second order).
"""

from collections.abc import Sequence

import numpy as np

from xdiff_lab.exceptions import ConfigError, FieldError, SolverBlowupError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid, wavenumbers
from xdiff_lab.frac_ops.operators import (
    dealias_mask,
    from_spectral,
    gradient_symbols,
    power_symbol,
    sobolev_proxy_norm,
    spectral_energy,
    to_spectral,
)
from xdiff_lab.kernels.models import KernelKind, MollifierFamily
from xdiff_lab.kernels.mollifier import fourier_transform, is_resolved, required_points
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.params.models import ModelParams
from xdiff_lab.pde.models import MonitorRecord, SolverConfig, Trajectory

logger = LabLogger().get_logger(__name__)

# Advisory bound on dt * k_max * max|transport velocity|
CFL_LIMIT = 0.5


def _smoothing(family: MollifierFamily | None, grid: PeriodicGrid) -> np.ndarray | None:
    if family is None:
        return None
    _, abs_xi = wavenumbers(grid)
    return fourier_transform(abs_xi, family, KernelKind.W_HAT_N)


def _velocity(
    u_hat: np.ndarray,
    model: ModelParams,
    grid: PeriodicGrid,
    smoothing: np.ndarray | None,
    mask: np.ndarray | None,
) -> np.ndarray:
    """sum_j a_ij grad^beta v_j in physical space, shape (d, n, *grid.shape)"""
    source = u_hat if smoothing is None else u_hat * smoothing
    if mask is not None:
        source = source * mask
    grads = np.stack(
        [
            from_spectral(source * symbol, grid)
            for symbol in gradient_symbols(grid, model.beta - 1.0)
        ]
    )
    return np.einsum("ij,aj...->ai...", np.asarray(model.a, dtype=np.float64), grads)


def _transport_hat(
    u_hat: np.ndarray,
    model: ModelParams,
    grid: PeriodicGrid,
    smoothing: np.ndarray | None,
    dealias: bool,
) -> np.ndarray:
    """Fourier coefficients of div(u_i sum_j a_ij grad^beta v_j)"""
    if not np.any(model.a):
        return np.zeros_like(u_hat)
    mask = dealias_mask(grid) if dealias else None
    density = from_spectral(u_hat if mask is None else u_hat * mask, grid)
    flux = density[None] * _velocity(u_hat, model, grid, smoothing, mask)
    flux_hat = to_spectral(flux, grid)
    out = sum(
        flux_hat[axis] * symbol for axis, symbol in enumerate(gradient_symbols(grid))
    )
    return out if mask is None else out * mask


def _diffusion_symbol(model: ModelParams, grid: PeriodicGrid) -> np.ndarray:
    """sigma_i |xi|^{2 alpha}, shape (n, *grid.shape)"""
    base = power_symbol(grid, 2.0 * model.alpha)
    return np.stack([sigma * base for sigma in model.sigma])


def _check_finite(values: np.ndarray, time: float, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise SolverBlowupError(
            f"Non-finite values in {what}", time=time, details={"what": what}
        )


def _rhs(
    u: Field,
    model: ModelParams,
    smoothing: np.ndarray | None,
    dealias: bool,
    time: float,
) -> Field:
    grid = u.grid
    if u.n != model.n:
        raise FieldError(f"Field has {u.n} species, model has n={model.n}")
    u_hat = to_spectral(u.values, grid)
    total = -_diffusion_symbol(model, grid) * u_hat + _transport_hat(
        u_hat, model, grid, smoothing, dealias
    )
    values = from_spectral(total, grid)
    _check_finite(values, time, "right-hand side")
    return u.with_values(values)


def rhs_regularized(
    u: Field,
    model: ModelParams,
    family: MollifierFamily,
    dealias: bool = True,
    time: float = 0.0,
) -> Field:
    """-sigma_i (-Delta)^alpha u_i + div(sum_j a_ij u_i grad^beta(u_j * W_hat_N))"""
    if not is_resolved(u.grid, family, KernelKind.W_HAT_N):
        logger.warning(
            f"W_hat_N (N={family.N}) is narrower than {u.grid.M} points resolve; "
            "its multiplier is still exact"
        )
    return _rhs(u, model, _smoothing(family, u.grid), dealias, time)


def rhs_limit(
    u: Field, model: ModelParams, dealias: bool = True, time: float = 0.0
) -> Field:
    """-sigma_i (-Delta)^alpha u_i + div(sum_j a_ij u_i grad^beta u_j)"""
    return _rhs(u, model, None, dealias, time)


class _Stepper:
    """Integrating-factor Heun step with the per-run symbols precomputed"""

    def __init__(self, model: ModelParams, cfg: SolverConfig, dt: float):
        self.model = model
        self.grid = cfg.grid
        self.dt = dt
        self.dealias = cfg.dealias
        self.smoothing = _smoothing(
            cfg.family if cfg.mode == "regularized" else None, cfg.grid
        )
        self.decay = np.exp(-_diffusion_symbol(model, cfg.grid) * dt)

    def transport(self, u_hat: np.ndarray) -> np.ndarray:
        return _transport_hat(
            u_hat, self.model, self.grid, self.smoothing, self.dealias
        )

    def __call__(self, u_hat: np.ndarray) -> np.ndarray:
        k1 = self.transport(u_hat)
        predictor = self.decay * (u_hat + self.dt * k1)
        k2 = self.transport(predictor)
        return self.decay * u_hat + 0.5 * self.dt * (self.decay * k1 + k2)


def step(
    u: Field,
    dt: float,
    model: ModelParams,
    cfg: SolverConfig,
    time: float = 0.0,
) -> Field:
    """One integrating-factor RK2 step of the system selected by ``cfg.mode``.

    Diffusion decays exactly as exp(-sigma_i |xi|^{2 alpha} dt); the
    transport term is advanced explicitly.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    u_hat = to_spectral(u.values, u.grid)
    stepper = _Stepper(model, cfg, dt)
    values = from_spectral(stepper(u_hat), u.grid)
    _check_growth(u.values, values, time + dt, cfg.growth_limit)
    return u.with_values(values)


def _check_growth(
    before: np.ndarray, after: np.ndarray, time: float, growth_limit: float
) -> None:
    _check_finite(after, time, "solution")
    old = float(np.sqrt(np.sum(before**2)))
    new = float(np.sqrt(np.sum(after**2)))
    if old > 0.0 and new > growth_limit * old:
        raise SolverBlowupError(
            f"Field norm grew by {new / old:.3g} in one step",
            time=time,
            details={"norm_before": old, "norm_after": new},
        )


def mass(u: Field) -> list[float]:
    """int u_i dx per species"""
    cell = u.grid.cell_volume
    return [float(np.sum(u.component(i)) * cell) for i in range(u.n)]


def min_value(u: Field) -> list[float]:
    return [float(np.min(u.component(i))) for i in range(u.n)]


def hs_proxy(u: Field, s: float) -> list[float]:
    """Spectral H^s norm per species"""
    return [sobolev_proxy_norm(u.component(i), s, u.grid) for i in range(u.n)]


def monitor(u: Field, t: float, s: float) -> MonitorRecord:
    return MonitorRecord(
        t=t, mass=mass(u), min_value=min_value(u), hs_proxy=hs_proxy(u, s)
    )


def norm_terms(u: Field, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-species ||u_i||_2^2 and ||(-Delta)^{alpha/2} u_i||_2^2"""
    grid = u.grid
    weight = power_symbol(grid, 2.0 * alpha)
    l2_sq = np.array([spectral_energy(u.component(i), grid) for i in range(u.n)])
    semi_sq = np.array(
        [spectral_energy(u.component(i), grid, weight) for i in range(u.n)]
    )
    return l2_sq, semi_sq


def _snapshot_steps(times: Sequence[float], dt: float) -> dict[int, float]:
    steps: dict[int, float] = {}
    for t in times:
        k = int(round(t / dt))
        if abs(k * dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ConfigError(f"Snapshot time {t} is not a multiple of dt={dt}")
        steps[k] = t
    return steps


def _cfl_advisory(u: Field, model: ModelParams, cfg: SolverConfig) -> None:
    if not np.any(model.a):
        return
    grid = cfg.grid
    u_hat = to_spectral(u.values, grid)
    smoothing = _smoothing(cfg.family if cfg.mode == "regularized" else None, grid)
    speed = float(np.max(np.abs(_velocity(u_hat, model, grid, smoothing, None))))
    _, abs_xi = wavenumbers(grid)
    courant = cfg.dt * float(np.max(abs_xi)) * speed
    if courant > CFL_LIMIT:
        logger.warning(
            f"Transport Courant number {courant:.3g} exceeds {CFL_LIMIT} "
            f"(dt={cfg.dt}); the run may be inaccurate"
        )


@log_operation()
def solve(u0: Field, cfg: SolverConfig, model: ModelParams) -> Trajectory:
    """Run from u0 to cfg.T, recording snapshots, monitors and norm accumulators.

    Raises SolverBlowupError as soon as the field turns non-finite or its
    norm grows by more than ``cfg.growth_limit`` in a single step.
    """
    grid = cfg.grid
    if u0.grid != grid:
        raise FieldError("Initial field does not live on the solver grid")
    if u0.n != model.n:
        raise FieldError(f"Initial field has {u0.n} species, model has n={model.n}")
    scale = max(float(np.max(np.abs(u0.values), initial=0.0)), 1.0)
    if float(np.min(u0.values, initial=0.0)) < -1e-12 * scale:
        raise FieldError("Initial data must be nonnegative")
    if cfg.mode == "regularized" and cfg.family is not None:
        if not is_resolved(grid, cfg.family, KernelKind.W_HAT_N):
            logger.warning(
                f"W_hat_N for N={cfg.family.N} needs M >= "
                f"{required_points(grid, cfg.family, KernelKind.W_HAT_N)}; "
                "continuing with its exact multiplier"
            )

    n_steps = int(round(cfg.T / cfg.dt))
    snapshots = _snapshot_steps(cfg.output_times(), cfg.dt)
    s = cfg.s
    stepper = _Stepper(model, cfg, cfg.dt)
    _cfl_advisory(u0, model, cfg)

    trajectory = Trajectory(alpha=model.alpha, dt=cfg.dt, mode=cfg.mode, N=cfg.N)
    u = u0
    u_hat = to_spectral(u0.values, grid)
    for k in range(n_steps + 1):
        if k in snapshots:
            t = snapshots[k]
            record = monitor(u, t, s)
            l2_sq, semi_sq = norm_terms(u, model.alpha)
            trajectory.record(t, u, l2_sq, semi_sq, record)
            logger.debug(
                "Snapshot",
                extra={
                    "context": {"t": t, "mass": record.mass, "min": record.min_value}
                },
            )
        if k == n_steps:
            break
        u_hat = stepper(u_hat)
        values = from_spectral(u_hat, grid)
        _check_growth(u.values, values, (k + 1) * cfg.dt, cfg.growth_limit)
        u = u.with_values(values)

    _log_summary(trajectory, u0)
    return trajectory


def _log_summary(trajectory: Trajectory, u0: Field) -> None:
    first, last = trajectory.monitors[0], trajectory.monitors[-1]
    drift = [
        abs(b - a) / abs(a) if a != 0.0 else abs(b)
        for a, b in zip(first.mass, last.mass, strict=True)
    ]
    floor = min(min(record.min_value) for record in trajectory.monitors)
    peak = float(np.max(u0.values, initial=0.0))
    if floor < -1e-6 * peak:
        logger.warning(
            f"Solution undershoots to {floor:.3g} (max of initial data {peak:.3g})"
        )
    if small_data_tripped(trajectory):
        logger.info("H^s proxy increased during the run")
    logger.debug(
        "Solver run done",
        extra={
            "context": {"mass_drift": drift, "min": floor, "mode": trajectory.mode}
        },
    )


def small_data_tripped(trajectory: Trajectory, rtol: float = 1e-10) -> bool:
    """Whether the H^s proxy of any species ever increased between snapshots"""
    values = np.array([record.hs_proxy for record in trajectory.monitors])
    if values.shape[0] < 2:
        return False
    increase = np.diff(values, axis=0)
    return bool(np.any(increase > rtol * np.maximum(values[:-1], 1e-300)))


@log_operation()
def bisect_small_data(
    u_shape: Field,
    cfg: SolverConfig,
    model: ModelParams,
    lo: float = 0.0,
    hi: float = 1.0,
    iterations: int = 8,
) -> float:
    """Largest amplitude factor c in [lo, hi] for which solving from c u_shape
    keeps the H^s proxy non-increasing.

    A blowup counts as a trip. Returns ``lo`` when even ``lo`` trips.
    """

    def holds(factor: float) -> bool:
        try:
            run = solve(u_shape.with_values(factor * u_shape.values), cfg, model)
        except SolverBlowupError:
            return False
        return not small_data_tripped(run)

    if holds(hi):
        return hi
    if lo > 0.0 and not holds(lo):
        return lo
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    logger.info(f"Small-data level for the H^s monitor: {lo:.6g}")
    return lo
