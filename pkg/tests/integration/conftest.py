# tests/integration/conftest.py
import logging
import math
import os

import pytest

from xdiff_lab.config import (
    BumpSpec,
    ExperimentConfig,
    GridSettings,
    InitialCondition,
    LoggingConfig,
    OutputSettings,
    ScalingSettings,
    SeedSettings,
    SolverSettings,
    SpeciesInitial,
    StudySettings,
)

logger = logging.getLogger(__name__)


@pytest.fixture(scope="session")
def test_threads() -> int:
    """Worker threads for the acceptance runs"""
    threads = int(os.getenv("XDIFF_TEST_THREADS", "4"))
    logger.debug(f"Acceptance runs use {threads} threads")
    return threads


@pytest.fixture(scope="session")
def quiet_logging() -> LoggingConfig:
    return LoggingConfig(
        level="WARNING",
        handlers={
            "console": {
                "class_name": "StreamHandler",
                "level": "WARNING",
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            }
        },
    )


@pytest.fixture
def acceptance_config(tmp_path, quiet_logging, test_threads) -> ExperimentConfig:
    """Default configuration, written under a temporary directory"""
    return ExperimentConfig(
        output=OutputSettings(out_dir=tmp_path / "runs"),
        threads=test_threads,
        logging=quiet_logging,
    )


@pytest.fixture
def reduced_config(tmp_path, quiet_logging) -> ExperimentConfig:
    """Default model on a coarser grid with short horizons"""
    return ExperimentConfig(
        scaling=ScalingSettings(
            N_list=[64, 256], reg_N_list=[64, 256], variance_N_list=[64, 256]
        ),
        grid=GridSettings(d=1, L=8.0 * math.pi, M=512),
        solver=SolverSettings(dt=0.01, T=0.1, n_snapshots=3),
        seeds=SeedSettings(master_seed=99, count=3),
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
        output=OutputSettings(out_dir=tmp_path / "runs", write_snapshots=False),
        logging=quiet_logging,
    )
