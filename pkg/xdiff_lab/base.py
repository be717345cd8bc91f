# xdiff_lab/base.py
import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import TypeVar, cast

import numpy as np
from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)
from tqdm import tqdm

from xdiff_lab.config import ExperimentConfig, InitialCondition
from xdiff_lab.exceptions import SolverBlowupError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid
from xdiff_lab.kernels.models import MollifierFamily
from xdiff_lab.logger import LabLogger
from xdiff_lab.params.models import ModelParams
from xdiff_lab.pde.models import SolverConfig, Trajectory
from xdiff_lab.pde.solver import solve

T = TypeVar("T")
R = TypeVar("R")

logger = LabLogger().get_logger(__name__)


def initial_field(initial: InitialCondition, grid: PeriodicGrid) -> Field:
    """Sum of periodic Gaussian bumps per species, each carrying its amplitude
    as mass, plus the uniform background.
    """
    mesh = np.stack(grid.mesh(), axis=-1)
    values = []
    for spec in initial.species:
        u = np.full(grid.shape, spec.background, dtype=np.float64)
        for bump in spec.bumps:
            dx = grid.minimum_image(mesh - np.asarray(bump.center, dtype=np.float64))
            r2 = np.sum(dx**2, axis=-1)
            norm = (2.0 * np.pi * bump.width**2) ** (-0.5 * grid.d)
            u += bump.amplitude * norm * np.exp(-0.5 * r2 / bump.width**2)
        values.append(u)
    return Field(grid, np.stack(values))


class BaseExperiment:
    def __init__(self, config: ExperimentConfig) -> None:
        """
        Initialize the experiment with the provided configuration.
        """
        self.config = config
        self.logger = LabLogger().get_logger(__name__)
        self.model: ModelParams = config.model
        self.interaction_scale = 1.0

        # Configure logging based on config
        LabLogger().configure(self.config.logging)

        self.grid = PeriodicGrid(d=config.grid.d, L=config.grid.L, M=config.grid.M)
        self.logger.info(
            "Initializing experiment",
            extra={
                "context": {
                    "config_hash": config.config_hash(),
                    "master_seed": config.seeds.master_seed,
                    "threads": config.threads,
                }
            },
        )

    @property
    def config_hash(self) -> str:
        return self.config.config_hash()

    @property
    def master_seed(self) -> int:
        return self.config.seeds.master_seed

    def initial_field(self) -> Field:
        return initial_field(self.config.initial, self.grid)

    def family(self, N: int) -> MollifierFamily:
        return MollifierFamily.from_scaling(self.config.scaling_for(N))

    def solver_config(self, family: MollifierFamily | None = None) -> SolverConfig:
        """Regularized system for ``family``, limit system without one"""
        return SolverConfig.from_settings(self.grid, self.config.solver, family)

    def solve(
        self,
        u0: Field,
        cfg: SolverConfig,
        model: ModelParams | None = None,
    ) -> Trajectory:
        """Run the solver, halving dt after every blowup until retries run out.

        The last SolverBlowupError propagates once the attempts are exhausted.
        """
        model = model or self.model
        retrying = Retrying(
            stop=stop_after_attempt(1 + self.config.solver.blowup_retries),
            retry=retry_if_exception_type(SolverBlowupError),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=True,
        )
        for attempt in retrying:
            with attempt:
                halvings = attempt.retry_state.attempt_number - 1
                run_cfg = cfg.with_dt(cfg.dt / 2**halvings) if halvings else cfg
                return solve(u0, run_cfg, model)
        raise AssertionError("unreachable")

    def run_tasks(
        self,
        fn: Callable[[T], R],
        tasks: Iterable[T],
        desc: str,
    ) -> list[R]:
        """Run ``fn`` over ``tasks`` on the worker pool, results in task order"""
        tasks = list(tasks)
        results: list[R | None] = [None] * len(tasks)
        with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            futures = {pool.submit(fn, task): index for index, task in enumerate(tasks)}
            for future in tqdm(
                as_completed(futures),
                total=len(futures),
                desc=desc,
                disable=None,
                leave=False,
            ):
                results[futures[future]] = future.result()
        return cast(list[R], results)
