# xdiff_lab/harness/__init__.py
from xdiff_lab.harness.experiments import (
    ExperimentRunner,
    preflight,
    run_converge_n,
    run_converge_reg,
    run_experiment,
    run_pure_diffusion,
    run_sampler_validation,
    run_simulate_particles,
    run_solve_pde,
    run_theorem2_probe,
    run_variance_study,
)
from xdiff_lab.harness.io import write_dat, write_results_csv, write_verdict_json
from xdiff_lab.harness.models import (
    RESULT_COLUMNS,
    ROW_PREFIX,
    Check,
    ExperimentId,
    ExperimentResult,
    ResultRow,
    Verdict,
)

__all__ = [
    "Check",
    "ExperimentId",
    "ExperimentResult",
    "ExperimentRunner",
    "RESULT_COLUMNS",
    "ROW_PREFIX",
    "ResultRow",
    "Verdict",
    "preflight",
    "run_converge_n",
    "run_converge_reg",
    "run_experiment",
    "run_pure_diffusion",
    "run_sampler_validation",
    "run_simulate_particles",
    "run_solve_pde",
    "run_theorem2_probe",
    "run_variance_study",
    "write_dat",
    "write_results_csv",
    "write_verdict_json",
]
