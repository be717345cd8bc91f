import math
import threading
import time
from unittest.mock import patch

import numpy as np
import pytest

from xdiff_lab.base import BaseExperiment, initial_field
from xdiff_lab.config import BumpSpec, InitialCondition, SpeciesInitial
from xdiff_lab.exceptions import SolverBlowupError
from xdiff_lab.frac_ops import PeriodicGrid
from xdiff_lab.pde import Trajectory, mass


@pytest.fixture
def experiment(small_config):
    return BaseExperiment(small_config)


class TestInitialField:
    def test_bump_mass_and_background(self):
        grid = PeriodicGrid(d=1, L=8.0 * math.pi, M=512)
        initial = InitialCondition(
            species=[
                SpeciesInitial(
                    bumps=[BumpSpec(center=[-1.0], width=1.0, amplitude=2.0)],
                    background=0.1,
                ),
                SpeciesInitial(),
            ]
        )
        u0 = initial_field(initial, grid)
        assert u0.n == 2
        total, empty = mass(u0)
        assert total == pytest.approx(2.0 + 0.1 * grid.L, rel=1e-8)
        assert empty == 0.0

    def test_bump_wraps_around_the_torus(self):
        grid = PeriodicGrid(d=1, L=2.0 * math.pi, M=128)
        edge = InitialCondition(
            species=[
                SpeciesInitial(
                    bumps=[BumpSpec(center=[math.pi], width=0.3, amplitude=1.0)]
                )
            ]
        )
        u0 = initial_field(edge, grid).component(0)
        # the node at -pi sits on the bump centre
        assert np.argmax(u0) == 0
        assert u0[1] == pytest.approx(u0[-1])

    def test_two_dimensional_field(self):
        grid = PeriodicGrid(d=2, L=8.0, M=64)
        initial = InitialCondition(
            species=[
                SpeciesInitial(
                    bumps=[BumpSpec(center=[0.5, -0.5], width=0.5, amplitude=1.0)]
                )
            ]
        )
        u0 = initial_field(initial, grid)
        assert u0.values.shape == (1, 64, 64)
        assert mass(u0)[0] == pytest.approx(1.0, rel=1e-8)


class TestBaseExperiment:
    def test_properties(self, experiment, small_config):
        assert experiment.config_hash == small_config.config_hash()
        assert experiment.master_seed == 7
        assert experiment.grid.M == 512
        assert experiment.family(64).N == 64
        assert experiment.solver_config().mode == "limit"
        assert experiment.solver_config(experiment.family(64)).mode == "regularized"

    def test_solve_halves_dt_after_blowup(self, experiment):
        u0 = experiment.initial_field()
        cfg = experiment.solver_config()
        result = Trajectory(alpha=0.85)
        blowup = SolverBlowupError("Non-finite values in solution", time=0.05)
        with patch("xdiff_lab.base.solve", side_effect=[blowup, result]) as solve:
            assert experiment.solve(u0, cfg) is result
        assert solve.call_count == 2
        assert solve.call_args_list[0].args[1].dt == cfg.dt
        assert solve.call_args_list[1].args[1].dt == pytest.approx(cfg.dt / 2)
        assert solve.call_args_list[1].args[2] == experiment.model

    def test_solve_reraises_when_retries_run_out(self, experiment):
        u0 = experiment.initial_field()
        cfg = experiment.solver_config()
        blowup = SolverBlowupError("Non-finite values in solution", time=0.05)
        with patch("xdiff_lab.base.solve", side_effect=blowup) as solve:
            with pytest.raises(SolverBlowupError):
                experiment.solve(u0, cfg)
        retries = experiment.config.solver.blowup_retries
        assert solve.call_count == 1 + retries
        last_dt = solve.call_args_list[-1].args[1].dt
        assert last_dt == pytest.approx(cfg.dt / 2**retries)

    def test_other_errors_are_not_retried(self, experiment):
        u0 = experiment.initial_field()
        with patch("xdiff_lab.base.solve", side_effect=ValueError("bad")) as solve:
            with pytest.raises(ValueError):
                experiment.solve(u0, experiment.solver_config())
        assert solve.call_count == 1

    def test_run_tasks_keeps_task_order(self, small_config):
        experiment = BaseExperiment(small_config.model_copy(update={"threads": 4}))
        seen = []
        lock = threading.Lock()

        def work(task):
            # later tasks finish first
            time.sleep(0.002 * (10 - task))
            with lock:
                seen.append(task)
            return task * task

        results = experiment.run_tasks(work, range(10), desc="squares")
        assert results == [task * task for task in range(10)]
        assert sorted(seen) == list(range(10))

    def test_run_tasks_propagates_errors(self, experiment):
        def work(task):
            if task == 2:
                raise SolverBlowupError("boom", time=0.0)
            return task

        with pytest.raises(SolverBlowupError):
            experiment.run_tasks(work, range(4), desc="failing")
