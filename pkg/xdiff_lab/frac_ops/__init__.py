# xdiff_lab/frac_ops/__init__.py
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid, nyquist_mask, wavenumbers
from xdiff_lab.frac_ops.io import (
    read_field_binary,
    write_field_binary,
    write_field_csv,
)
from xdiff_lab.frac_ops.models import QuadratureSettings, WeightRatioReport
from xdiff_lab.frac_ops.operators import (
    dealias,
    dealias_mask,
    divergence,
    fourier_multiplier_apply,
    frac_gradient,
    frac_laplacian,
    gagliardo_nirenberg_check,
    gradient,
    h_alpha_seminorm,
    l2_norm,
    power_symbol,
    riesz_lp_check,
    riesz_potential,
    sobolev_proxy_norm,
    spectral_energy,
)
from xdiff_lab.frac_ops.quadrature import (
    c_d_alpha,
    log_weight,
    log_weight_ratio_check,
    pv_frac_laplacian_point,
)

__all__ = [
    "Field",
    "PeriodicGrid",
    "QuadratureSettings",
    "WeightRatioReport",
    "c_d_alpha",
    "dealias",
    "dealias_mask",
    "divergence",
    "fourier_multiplier_apply",
    "frac_gradient",
    "frac_laplacian",
    "gagliardo_nirenberg_check",
    "gradient",
    "h_alpha_seminorm",
    "l2_norm",
    "log_weight",
    "log_weight_ratio_check",
    "nyquist_mask",
    "power_symbol",
    "pv_frac_laplacian_point",
    "read_field_binary",
    "riesz_lp_check",
    "riesz_potential",
    "sobolev_proxy_norm",
    "spectral_energy",
    "wavenumbers",
    "write_field_binary",
    "write_field_csv",
]
