# xdiff_lab/particles/__init__.py
from xdiff_lab.particles.diagnostics import (
    empirical_force_variance,
    force_at,
    generator_check,
    initial_condition_gap,
    loglog_slope,
)
from xdiff_lab.particles.dynamics import (
    canonical_order,
    compute_drift,
    deposit_h,
    deposit_s_hat,
    drift_direct,
    drift_grid,
    em_step,
    init_from_density,
    interpolate_periodic,
    simulate,
)
from xdiff_lab.particles.io import positions_frame, write_positions_csv
from xdiff_lab.particles.models import (
    GeneratorCheckResult,
    ParticleEnsemble,
    ParticleRun,
    StepRecord,
)

__all__ = [
    "GeneratorCheckResult",
    "ParticleEnsemble",
    "ParticleRun",
    "StepRecord",
    "canonical_order",
    "compute_drift",
    "deposit_h",
    "deposit_s_hat",
    "drift_direct",
    "drift_grid",
    "em_step",
    "empirical_force_variance",
    "force_at",
    "generator_check",
    "init_from_density",
    "initial_condition_gap",
    "interpolate_periodic",
    "loglog_slope",
    "positions_frame",
    "simulate",
    "write_positions_csv",
]
