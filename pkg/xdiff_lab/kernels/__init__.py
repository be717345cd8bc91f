# xdiff_lab/kernels/__init__.py
from xdiff_lab.kernels.force import (
    build_force_table,
    free_profile,
    grad_beta_vhat_n,
    periodic_profile,
    write_force_table_csv,
)
from xdiff_lab.kernels.models import (
    AssumptionReport,
    ForceTable,
    KernelKind,
    MollifierFamily,
)
from xdiff_lab.kernels.mollifier import (
    assumption_spot_check,
    check_resolved,
    deposit_points,
    fourier_transform,
    gaussian_density,
    is_resolved,
    kernel_std,
    mollifier_rate_check,
    mollify,
    mollify_field,
    required_points,
    w_n_eval,
)

__all__ = [
    "AssumptionReport",
    "ForceTable",
    "KernelKind",
    "MollifierFamily",
    "assumption_spot_check",
    "build_force_table",
    "check_resolved",
    "deposit_points",
    "fourier_transform",
    "free_profile",
    "gaussian_density",
    "grad_beta_vhat_n",
    "is_resolved",
    "kernel_std",
    "mollifier_rate_check",
    "mollify",
    "mollify_field",
    "periodic_profile",
    "required_points",
    "w_n_eval",
    "write_force_table_csv",
]
