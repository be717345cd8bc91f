import math

import numpy as np
import pandas as pd
import pytest
from scipy.integrate import quad

from xdiff_lab.exceptions import ConfigError, UnderResolutionError
from xdiff_lab.frac_ops import PeriodicGrid, wavenumbers
from xdiff_lab.kernels import (
    KernelKind,
    MollifierFamily,
    assumption_spot_check,
    build_force_table,
    check_resolved,
    fourier_transform,
    grad_beta_vhat_n,
    is_resolved,
    kernel_std,
    mollifier_rate_check,
    mollify,
    required_points,
    w_n_eval,
    write_force_table_csv,
)


@pytest.fixture
def grid():
    """Resolves every kernel of the N = 256 reference family"""
    return PeriodicGrid(d=1, L=2.0 * math.pi, M=128)


def oscillatory_force(r, beta, std):
    """(2 pi)^-1 int i xi |xi|^(beta-1) exp(-xi^2 std^2 / 2) e^{i xi r} d xi"""
    a = 0.5 * std**2
    value, _ = quad(
        lambda xi: xi**beta * math.exp(-a * xi * xi),
        0.0,
        12.0 / std,
        weight="sin",
        wvar=r,
        epsabs=1e-14,
        epsrel=1e-12,
        limit=400,
    )
    return -value / math.pi


class TestMollifierFamily:
    def test_identity_scaling_at_unit_n(self, scaling):
        family = MollifierFamily.from_scaling(scaling.with_N(1))
        assert family.kappa_N == family.kappa_hat_N == 1.0
        assert w_n_eval(0.7, family) == pytest.approx(
            math.exp(-0.245) / math.sqrt(2.0 * math.pi)
        )

    def test_peak_value(self, family):
        assert w_n_eval(0.0, family) == pytest.approx(
            family.kappa_N / math.sqrt(2.0 * math.pi)
        )

    def test_w_n_is_narrower(self, scaling):
        for N in (2, 64, 4096):
            family = MollifierFamily.from_scaling(scaling.with_N(N))
            assert kernel_std(family, KernelKind.W_N) < kernel_std(
                family, KernelKind.W_HAT_N
            )

    def test_kernels_integrate_to_one(self, family):
        grid = PeriodicGrid(d=1, L=16.0, M=512)
        x = grid.nodes()
        for which in (KernelKind.W_N, KernelKind.W_HAT_N, KernelKind.V_HAT_N):
            mass = float(np.sum(w_n_eval(x, family, which))) * grid.h
            assert mass == pytest.approx(1.0, abs=1e-6)

    def test_convolution_theorem(self, family, grid):
        _, abs_xi = wavenumbers(grid)
        product = fourier_transform(
            abs_xi, family, KernelKind.W_N
        ) * fourier_transform(abs_xi, family, KernelKind.W_HAT_N)
        assert np.allclose(
            fourier_transform(abs_xi, family, KernelKind.V_HAT_N),
            product,
            rtol=1e-12,
            atol=1e-300,
        )

    def test_assumption_spot_check(self):
        report = assumption_spot_check(np.linspace(0.0, 20.0, 401))
        assert report.ok
        assert report.sup_abs == pytest.approx(1.0)
        report_2d = assumption_spot_check(np.linspace(0.0, 10.0, 101), d=2)
        assert report_2d.exponential_decay


class TestResolution:
    def test_coarse_grid_is_rejected(self, family):
        coarse = PeriodicGrid(d=1, L=2.0 * math.pi, M=16)
        assert not is_resolved(coarse, family, KernelKind.W_N)
        with pytest.raises(UnderResolutionError) as exc_info:
            check_resolved(coarse, family, KernelKind.W_N)
        required = exc_info.value.required_M
        assert required == required_points(coarse, family, KernelKind.W_N)
        assert is_resolved(coarse.with_M(required), family, KernelKind.W_N)

    def test_mollify_reports_required_points(self, family):
        coarse = PeriodicGrid(d=1, L=2.0 * math.pi, M=16)
        with pytest.raises(UnderResolutionError, match="requires M >="):
            mollify(np.zeros((3, 1)), KernelKind.W_N, family, coarse)


class TestMollify:
    def test_empty_ensemble(self, family, grid):
        out = mollify(np.zeros((0, 1)), KernelKind.W_N, family, grid)
        assert out.shape == grid.shape
        assert np.all(out == 0.0)

    def test_single_particle_is_shifted_kernel(self, family, grid):
        x0 = grid.nodes()[70]
        out = mollify(np.array([[x0]]), KernelKind.W_N, family, grid)
        dx = grid.minimum_image(grid.nodes() - x0)
        expected = w_n_eval(dx, family) / family.N
        assert np.allclose(out, expected, rtol=0.0, atol=1e-8)

    def test_mass_is_count_over_n(self, family, grid, rng):
        points = rng.uniform(-math.pi, math.pi, size=(100, 1))
        out = mollify(points, KernelKind.W_N, family, grid)
        mass = float(np.sum(out)) * grid.h
        assert mass == pytest.approx(100 / family.N, abs=1e-8)

    def test_field_convolution_preserves_mass(self, family, grid):
        x = grid.nodes()
        f = 1.0 + 0.5 * np.cos(x)
        out = mollify(f, KernelKind.W_HAT_N, family, grid)
        assert float(np.sum(out)) == pytest.approx(float(np.sum(f)), rel=1e-12)
        factor = math.exp(-0.5 * kernel_std(family, KernelKind.W_HAT_N) ** 2)
        assert np.allclose(out, 1.0 + 0.5 * factor * np.cos(x))

    def test_two_dimensional_deposition_mass(self, scaling, rng):
        family = MollifierFamily.from_scaling(
            scaling.model_copy(update={"d": 2, "delta": 0.1, "N": 64})
        )
        grid = PeriodicGrid(d=2, L=2.0 * math.pi, M=128)
        points = rng.uniform(-math.pi, math.pi, size=(10, 2))
        out = mollify(points, KernelKind.W_N, family, grid)
        assert float(np.sum(out)) * grid.cell_volume == pytest.approx(
            10 / 64, abs=1e-8
        )


class TestMollifierRateCheck:
    def test_single_mode_error_is_exact(self, scaling, grid):
        x = grid.nodes()
        table = mollifier_rate_check(np.sin(x), [64, 256, 1024], scaling, grid)
        assert list(table.columns) == [
            "N",
            "kappa_hat_N",
            "error",
            "bound_scale",
            "ratio",
        ]
        for row in table.itertuples():
            damping = math.exp(-0.5 / row.kappa_hat_N**2)
            assert row.error == pytest.approx((1.0 - damping) * math.sqrt(math.pi))
        assert table["error"].is_monotonic_decreasing

    def test_constant_has_no_error(self, scaling, grid):
        table = mollifier_rate_check(np.ones(grid.M), [64, 256], scaling, grid)
        assert np.allclose(table["error"], 0.0)
        assert np.all(table["ratio"] == 0.0)

    def test_ratio_bounded_for_bump(self, scaling):
        grid = PeriodicGrid(d=1, L=16.0 * math.pi, M=1024)
        x = grid.nodes()
        f = np.exp(-0.5 * x**2)
        table = mollifier_rate_check(f, [2**k for k in range(6, 13)], scaling, grid)
        assert table["ratio"].max() <= 1.0


class TestForceTable:
    def test_matches_oscillatory_quadrature(self, family):
        grid = PeriodicGrid(d=1, L=16.0, M=256)
        table = build_force_table(family, 0.5, grid, kind="free")
        std = kernel_std(family, KernelKind.V_HAT_N)
        for r in (0.5, 1.0, 2.5):
            expected = oscillatory_force(r, 0.5, std)
            assert float(table(r)) == pytest.approx(expected, rel=1e-6)

    def test_vanishes_at_origin_and_is_odd(self, family, grid):
        table = build_force_table(family, 0.5, grid)
        assert table.kind == "periodic"
        assert float(table(0.0)) == 0.0
        assert np.allclose(table.force(np.zeros((1, 1))), 0.0)
        dx = np.array([[0.3], [1.1], [2.0]])
        assert np.allclose(table.force(-dx), -table.force(dx))

    def test_zero_beyond_range(self, family, grid):
        table = build_force_table(family, 0.5, grid)
        assert float(table(table.r_max + 1.0)) == 0.0

    def test_direction(self, family):
        grid = PeriodicGrid(d=2, L=2.0 * math.pi, M=64)
        family_2d = MollifierFamily.from_scaling(
            family.scaling.model_copy(update={"d": 2, "delta": 0.1})
        )
        table = build_force_table(family_2d, 0.5, grid)
        assert table.kind == "free"
        direction = np.array([0.6, 0.8])
        value = grad_beta_vhat_n(1.0, direction, table)
        assert np.allclose(value, float(table(1.0)) * direction)

    def test_periodic_table_needs_one_dimension(self, family):
        grid = PeriodicGrid(d=2, L=2.0 * math.pi, M=64)
        with pytest.raises(ConfigError):
            build_force_table(family, 0.5, grid, kind="periodic")

    def test_rejects_beta_out_of_range(self, family, grid):
        with pytest.raises(ConfigError):
            build_force_table(family, 1.0, grid)

    def test_csv_dump(self, family, grid, tmp_path):
        table = build_force_table(family, 0.5, grid)
        frame = pd.read_csv(write_force_table_csv(tmp_path / "force.csv", table))
        assert list(frame.columns) == ["r", "profile"]
        assert len(frame) == table.r.size
