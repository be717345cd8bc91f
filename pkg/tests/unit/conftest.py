# tests/unit/conftest.py
import math

import numpy as np
import pytest

from xdiff_lab.config import (
    BumpSpec,
    ExperimentConfig,
    GridSettings,
    InitialCondition,
    LoggingConfig,
    OutputSettings,
    ParticleSettings,
    ScalingSettings,
    SeedSettings,
    SolverSettings,
    SpeciesInitial,
    StudySettings,
)
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid
from xdiff_lab.kernels.models import MollifierFamily
from xdiff_lab.params.models import ModelParams, ScalingParams


@pytest.fixture
def quiet_logging():
    """Logging configuration that only lets errors through"""
    return LoggingConfig(
        level="ERROR",
        handlers={
            "console": {
                "class_name": "StreamHandler",
                "level": "ERROR",
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            }
        },
    )


@pytest.fixture
def grid_2pi():
    """One-dimensional torus of side 2 pi, where sin(x) has |xi| = 1"""
    return PeriodicGrid(d=1, L=2.0 * math.pi, M=64)


@pytest.fixture
def grid_2d():
    return PeriodicGrid(d=2, L=2.0 * math.pi, M=32)


@pytest.fixture
def model():
    """Admissible two-species model in d = 1"""
    return ModelParams(
        n=2,
        alpha=0.85,
        beta=0.5,
        sigma=[1.0, 1.0],
        a=[[0.5, -0.3], [0.2, 0.4]],
        d=1,
    )


@pytest.fixture
def free_model(model):
    """Same model without interaction"""
    return model.without_interaction()


@pytest.fixture
def scaling():
    return ScalingParams(N=256, d=1, delta=0.2, rho=0.05, kappa=0.23, kappa_hat=0.03)


@pytest.fixture
def family(scaling):
    return MollifierFamily.from_scaling(scaling)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bump_field(grid_2pi):
    """Two smooth positive species on the 2 pi torus"""
    return Field.from_functions(
        grid_2pi,
        [
            lambda x: 1.0 + 0.3 * np.cos(x),
            lambda x: 1.0 + 0.2 * np.sin(2.0 * x),
        ],
    )


@pytest.fixture
def small_config(tmp_path, model, quiet_logging):
    """Experiment configuration small enough for unit tests"""
    return ExperimentConfig(
        model=model,
        scaling=ScalingSettings(
            N_list=[64, 256], reg_N_list=[64, 256], variance_N_list=[64, 256]
        ),
        grid=GridSettings(d=1, L=8.0 * math.pi, M=512),
        solver=SolverSettings(dt=0.01, T=0.1, n_snapshots=3),
        particles=ParticleSettings(dt=0.01),
        seeds=SeedSettings(master_seed=7, count=2),
        initial=InitialCondition(
            species=[
                SpeciesInitial(
                    bumps=[BumpSpec(center=[-1.0], width=2.0, amplitude=1.0)]
                ),
                SpeciesInitial(
                    bumps=[BumpSpec(center=[1.0], width=2.5, amplitude=1.0)]
                ),
            ]
        ),
        study=StudySettings(
            sampler_count=20_000,
            tail_count=20_000,
            variance_seeds=4,
            bl_modes=4,
            bl_tents=16,
        ),
        output=OutputSettings(out_dir=tmp_path / "runs"),
        logging=quiet_logging,
    )
