import os
from contextlib import contextmanager
from pathlib import Path

import pytest

from xdiff_lab.config import (
    ExperimentConfig,
    GridSettings,
    LoggingConfig,
    LogHandlerConfig,
    ScalingSettings,
    SolverSettings,
)
from xdiff_lab.exceptions import ConfigError


@contextmanager
def temp_environ():
    """Context manager to temporarily modify environment variables."""
    old_environ = dict(os.environ)
    try:
        yield os.environ
    finally:
        os.environ.clear()
        os.environ.update(old_environ)


@pytest.fixture
def env_vars(tmp_path):
    """Fixture to set up and tear down environment variables"""
    log_path = tmp_path / "logs"
    test_vars = {
        "XDIFF_SEED": "99",
        "XDIFF_OUT": str(tmp_path / "out"),
        "XDIFF_THREADS": "3",
        "XDIFF_LOG_CONSOLE": "true",
        "XDIFF_LOG_CONSOLE_LEVEL": "DEBUG",
        "XDIFF_LOG_PATH": str(log_path),
        "XDIFF_LOG_FILE_LEVEL": "INFO",
        "XDIFF_LOG_JSON": "true",
        "XDIFF_LOG_JSON_LEVEL": "WARNING",
        "XDIFF_LOG_LEVEL": "DEBUG",
    }
    with temp_environ() as env:
        env.pop("XDIFF_CONFIG", None)
        env.update(test_vars)
        yield test_vars


CONFIG_TOML = """
threads = 2

[model]
n = 1
alpha = 0.85
beta = 0.5
sigma = [1.0]
a = [[0.25]]
d = 1

[grid]
d = 1
L = 25.0
M = 256

[solver]
dt = 0.005
T = 0.5

[seeds]
master_seed = 42
count = 3

[[initial.species]]
background = 0.1

[[initial.species.bumps]]
center = [0.0]
width = 1.5
amplitude = 2.0
"""


def test_log_handler_config_validation():
    """Test log handler configuration validation"""
    config = LogHandlerConfig(class_name="StreamHandler", level="debug")
    assert config.level == "DEBUG"

    with pytest.raises(ValueError):
        LogHandlerConfig(class_name="StreamHandler", level="LOUD")


def test_logging_config_from_env(env_vars):
    """Test logging configuration from environment variables"""
    config = LoggingConfig.from_env()

    assert config.level == "DEBUG"
    assert config.handlers["console"].level == "DEBUG"
    expected_path = Path(env_vars["XDIFF_LOG_PATH"])
    assert config.log_path.resolve() == expected_path.resolve()

    file_handler = config.handlers["file"]
    assert file_handler.class_name == "RotatingFileHandler"
    assert Path(file_handler.handler_kwargs["filename"]).parent.resolve() == (
        expected_path.resolve()
    )
    assert config.handlers["json"].level == "WARNING"


class TestExperimentConfig:
    def test_defaults_are_consistent(self):
        cfg = ExperimentConfig()
        assert cfg.model.d == cfg.grid.d == 1
        assert len(cfg.initial.species) == cfg.model.n
        assert cfg.scaling.N_list == [500, 2000, 8000]
        assert cfg.hs_order() == pytest.approx(3.0)

    def test_from_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(CONFIG_TOML)
        cfg = ExperimentConfig.from_toml(path)
        assert cfg.model.n == 1
        assert cfg.grid.M == 256
        assert cfg.solver.dt == 0.005
        assert cfg.seeds.seeds() == [42, 43, 44]
        assert cfg.initial.species[0].bumps[0].amplitude == 2.0
        assert cfg.threads == 2

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_toml(tmp_path / "missing.toml")
        bad = tmp_path / "bad.toml"
        bad.write_text("[model\nn = ")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_toml(bad)

    def test_dimension_mismatch_is_config_error(self):
        data = ExperimentConfig().model_dump()
        data["grid"]["d"] = 2
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)

    def test_grid_points_must_be_power_of_two(self):
        with pytest.raises(ValueError):
            GridSettings(d=1, L=10.0, M=96)

    def test_n_lists_are_sorted_and_deduplicated(self):
        settings = ScalingSettings(N_list=[800, 200, 200])
        assert settings.N_list == [200, 800]
        with pytest.raises(ValueError):
            ScalingSettings(N_list=[])

    def test_snapshot_times(self):
        settings = SolverSettings(T=1.0, n_snapshots=5)
        assert settings.snapshot_times() == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_overrides(self, tmp_path):
        cfg = ExperimentConfig().with_overrides(
            seed=5, out=tmp_path, threads=4, log_level="warning"
        )
        assert cfg.seeds.master_seed == 5
        assert cfg.output.out_dir == tmp_path
        assert cfg.threads == 4
        assert cfg.logging.level == "WARNING"
        assert cfg.logging.handlers["console"].level == "WARNING"

    def test_from_env(self, env_vars):
        cfg = ExperimentConfig.from_env()
        assert cfg.seeds.master_seed == 99
        assert cfg.threads == 3
        assert cfg.output.out_dir == Path(env_vars["XDIFF_OUT"])

    def test_config_hash(self, tmp_path):
        cfg = ExperimentConfig()
        assert cfg.config_hash() == ExperimentConfig().config_hash()
        assert len(cfg.config_hash()) == 64
        # output location and thread count do not affect results
        moved = cfg.with_overrides(out=tmp_path, threads=8)
        assert moved.config_hash() == cfg.config_hash()
        reseeded = cfg.with_overrides(seed=cfg.seeds.master_seed + 1)
        assert reseeded.config_hash() != cfg.config_hash()

    def test_scaling_for(self):
        cfg = ExperimentConfig()
        s = cfg.scaling_for(1024)
        assert s.N == 1024
        assert s.d == cfg.model.d
        assert s.kappa == cfg.scaling.kappa
