import math

import numpy as np
import pytest

from xdiff_lab.frac_ops import Field, PeriodicGrid, l2_norm
from xdiff_lab.kernels import MollifierFamily, build_force_table
from xdiff_lab.levy import RngStream
from xdiff_lab.params import ModelParams, ScalingParams
from xdiff_lab.particles import (
    drift_direct,
    drift_grid,
    generator_check,
    init_from_density,
    simulate,
)
from xdiff_lab.pde import SolverConfig, solve

pytestmark = pytest.mark.integration


def default_model():
    return ModelParams(
        n=2, alpha=0.85, beta=0.5, sigma=[1.0, 1.0], a=[[0.5, -0.3], [0.2, 0.4]]
    )


def scaling_for(N):
    return ScalingParams(N=N, d=1, delta=0.2, rho=0.05, kappa=0.23, kappa_hat=0.03)


def two_bumps(grid):
    return Field.from_functions(
        grid,
        [
            lambda x: np.exp(-0.5 * (x + 1.0) ** 2 / 4.0) / math.sqrt(8.0 * math.pi),
            lambda x: np.exp(-0.5 * (x - 1.0) ** 2 / 6.25) / math.sqrt(12.5 * math.pi),
        ],
    )


def brute_force_drift(ensemble, model, table):
    """One pair at a time, scalar minimum image"""
    L = ensemble.grid.L
    forces = []
    for i, targets in enumerate(ensemble.positions):
        out = np.zeros_like(targets)
        for k, x in enumerate(targets[:, 0]):
            total = 0.0
            for j, sources in enumerate(ensemble.positions):
                for y in sources[:, 0]:
                    dx = x - y
                    dx -= L * round(dx / L)
                    if dx == 0.0:
                        continue
                    r = abs(dx)
                    total -= model.a[i][j] * float(table(r)) * dx / r
            out[k, 0] = ensemble.weight * total
        forces.append(out)
    return forces


class TestDriftOracles:
    def test_direct_sum_matches_pair_loop(self):
        grid = PeriodicGrid(d=1, L=8.0 * math.pi, M=512)
        model = default_model()
        family = MollifierFamily.from_scaling(scaling_for(128))
        table = build_force_table(family, model.beta, grid)
        e = init_from_density(
            two_bumps(grid), 128, RngStream(master_seed=5), counts=[64, 64]
        )

        direct = drift_direct(e, model, table)
        loop = brute_force_drift(e, model, table)
        for a, b in zip(direct, loop, strict=True):
            scale = float(np.max(np.abs(b)))
            assert scale > 0.0
            assert np.max(np.abs(a - b)) <= 1e-12 * scale

    @pytest.mark.slow
    def test_grid_drift_matches_direct_sum(self):
        grid = PeriodicGrid(d=1, L=16.0 * math.pi, M=4096)
        model = default_model()
        family = MollifierFamily.from_scaling(scaling_for(2000))
        table = build_force_table(family, model.beta, grid)
        e = init_from_density(two_bumps(grid), 2000, RngStream(master_seed=6))

        direct = drift_direct(e, model, table)
        spectral = drift_grid(e, grid, model, family)
        scale = max(float(np.max(np.abs(f))) for f in direct)
        for a, b in zip(direct, spectral, strict=True):
            assert np.max(np.abs(a - b)) <= 1e-3 * scale


class TestSolverAccuracy:
    def test_self_convergence_order_in_dt(self):
        grid = PeriodicGrid(d=1, L=2.0 * math.pi, M=64)
        u0 = Field.from_functions(
            grid,
            [
                lambda x: 1.0 + 0.3 * np.cos(x),
                lambda x: 1.0 + 0.2 * np.sin(2.0 * x),
            ],
        )
        model = default_model()
        finals = [
            solve(u0, SolverConfig(grid=grid, dt=dt, T=0.2), model).final
            for dt in (0.01, 0.005, 0.0025)
        ]
        coarse = l2_norm((finals[0] - finals[1]).values, grid)
        fine = l2_norm((finals[1] - finals[2]).values, grid)
        assert math.log2(coarse / fine) == pytest.approx(2.0, abs=0.2)

    @pytest.mark.slow
    def test_unit_horizon_mass_and_positivity(self):
        grid = PeriodicGrid(d=1, L=16.0 * math.pi, M=1024)
        u0 = two_bumps(grid)
        trajectory = solve(u0, SolverConfig(grid=grid, dt=1e-3, T=1.0), default_model())
        peak = float(np.max(u0.values))
        first, last = trajectory.monitors[0], trajectory.monitors[-1]
        for a, b in zip(first.mass, last.mass, strict=True):
            assert b == pytest.approx(a, rel=1e-10)
        for record in trajectory.monitors:
            assert min(record.min_value) >= -1e-6 * peak


@pytest.mark.slow
class TestGeneratorIdentity:
    SEEDS = 64

    def runs(self, model, grid, u0, N, dt, T=0.1):
        family = MollifierFamily.from_scaling(scaling_for(N))
        out = []
        for seed in range(self.SEEDS):
            stream = RngStream(master_seed=1000 + seed)
            e = init_from_density(u0, N, stream)
            out.append(
                simulate(e, model, family, dt, T, stream, [0.0, T], record_steps=True)
            )
        return out

    def test_pure_noise_within_three_standard_errors(self):
        grid = PeriodicGrid(d=1, L=2.0 * math.pi, M=256)
        model = ModelParams(n=1, alpha=0.85, beta=0.5, sigma=[1.0], a=[[0.0]])
        u0 = Field.from_functions(
            grid, [lambda x: (1.0 + 0.3 * np.cos(x)) / (2.0 * math.pi)]
        )
        result = generator_check(self.runs(model, grid, u0, 4000, 0.005), np.cos, model)
        assert abs(result.residual) <= 3.0 * result.stderr

    def test_full_model_residual_shrinks_with_dt(self):
        grid = PeriodicGrid(d=1, L=8.0 * math.pi, M=1024)
        model = default_model()
        u0 = two_bumps(grid)

        def psi(x):
            return np.cos(x / 4.0)

        coarse = generator_check(self.runs(model, grid, u0, 2000, 0.02), psi, model)
        fine = generator_check(self.runs(model, grid, u0, 2000, 0.01), psi, model)
        assert abs(fine.residual) <= abs(coarse.residual) + 2.0 * fine.stderr
