# xdiff_lab/pde/__init__.py
from xdiff_lab.pde.io import (
    write_monitors_csv,
    write_run_metadata_json,
    write_snapshots,
)
from xdiff_lab.pde.models import MonitorRecord, SolverConfig, Trajectory
from xdiff_lab.pde.solver import (
    bisect_small_data,
    hs_proxy,
    mass,
    min_value,
    monitor,
    norm_terms,
    rhs_limit,
    rhs_regularized,
    small_data_tripped,
    solve,
    step,
)

__all__ = [
    "MonitorRecord",
    "SolverConfig",
    "Trajectory",
    "bisect_small_data",
    "hs_proxy",
    "mass",
    "min_value",
    "monitor",
    "norm_terms",
    "rhs_limit",
    "rhs_regularized",
    "small_data_tripped",
    "solve",
    "step",
    "write_monitors_csv",
    "write_run_metadata_json",
    "write_snapshots",
]
