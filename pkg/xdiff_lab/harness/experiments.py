# xdiff_lab/harness/experiments.py
"""Seeded experiment drivers.

Every driver returns an :class:`ExperimentResult` whose table is sorted by
(N, seed, species) and whose checks become the PASS/FAIL verdict.
Probability statements are read as seed-ensemble medians and exceedance
fractions; limits are read as monotone trends over the configured N-lists.
"""

import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from xdiff_lab.base import BaseExperiment
from xdiff_lab.config import ExperimentConfig
from xdiff_lab.exceptions import (
    FieldError,
    SolverBlowupError,
    UnderResolutionError,
)
from xdiff_lab.frac_ops.grid import wavenumbers
from xdiff_lab.frac_ops.io import write_field_binary, write_field_csv
from xdiff_lab.frac_ops.operators import fourier_multiplier_apply
from xdiff_lab.harness.io import write_dat, write_results_csv, write_verdict_json
from xdiff_lab.harness.models import (
    RESULT_COLUMNS,
    ROW_PREFIX,
    Check,
    ExperimentId,
    ExperimentResult,
    ResultRow,
    Verdict,
)
from xdiff_lab.levy.models import RngStream, StableParams, StreamPurpose
from xdiff_lab.levy.sampler import sample_increments
from xdiff_lab.levy.validation import semigroup_check, tail_slope, validate_sampler
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.metrics.functionals import (
    bl_dictionary,
    paired_from_trajectories,
    sup_bl_distance,
    trajectory_norm,
)
from xdiff_lab.params.models import ModelParams
from xdiff_lab.params.validation import (
    derived_scales,
    moderate_variance_exponent,
    require_admissible,
    validate_model,
    validate_scaling,
)
from xdiff_lab.particles.diagnostics import (
    empirical_force_variance,
    initial_condition_gap,
    loglog_slope,
)
from xdiff_lab.particles.dynamics import init_from_density, simulate
from xdiff_lab.particles.io import write_positions_csv
from xdiff_lab.particles.models import ParticleEnsemble, ParticleRun
from xdiff_lab.pde.io import (
    write_monitors_csv,
    write_run_metadata_json,
    write_snapshots,
)
from xdiff_lab.pde.models import Trajectory
from xdiff_lab.pde.solver import small_data_tripped

logger = LabLogger().get_logger(__name__)

# Runtime failures that turn a row into a flagged failed row
ROW_FAILURES = (SolverBlowupError, UnderResolutionError, FieldError)
# Norms at or below this level count as exact agreement
NORM_FLOOR = 1e-24
MASS_RTOL = 1e-10
UNDERSHOOT = 1e-6
SAMPLER_Z = 3.0
TAIL_SLOPE_TOLERANCE = 0.1
VARIANCE_SLOPE_MARGIN = 0.15
SEMIGROUP_STEPS = 4

# Experiments that run the small-data monitor before starting
SMALL_DATA_PREFLIGHT = {
    ExperimentId.SIMULATE_PARTICLES,
    ExperimentId.SOLVE_PDE,
    ExperimentId.CONVERGE_N,
    ExperimentId.CONVERGE_REG,
    ExperimentId.THEOREM2_PROBE,
}


def strictly_decreasing(values: Sequence[float], floor: float = NORM_FLOOR) -> bool:
    """b < a for consecutive values, treating pairs at the floor as equal"""
    values = [float(v) for v in values]
    if any(np.isnan(v) for v in values):
        return False
    return all(
        b < a or (a <= floor and b <= floor)
        for a, b in zip(values, values[1:], strict=False)
    )


def non_increasing(values: Sequence[float]) -> bool:
    """b <= a for consecutive values; a NaN anywhere fails"""
    values = [float(v) for v in values]
    if any(np.isnan(v) for v in values):
        return False
    return all(b <= a for a, b in zip(values, values[1:], strict=False))


def by_N(N_list: Sequence[int], values: pd.Series) -> dict[str, float]:
    return {str(N): float(v) for N, v in zip(N_list, values.to_list(), strict=True)}


def succeeded(table: pd.DataFrame, **dtypes: type) -> pd.DataFrame:
    """Rows that did not fail, with measured columns cast for aggregation"""
    return table[~table["failed"].astype(bool)].astype(dtypes)


class ExperimentRunner(BaseExperiment):
    """Drivers for every harness subcommand over one configuration"""

    def __init__(self, config: ExperimentConfig) -> None:
        super().__init__(config)
        self.u0 = self.initial_field()
        self.out_dir: Path = config.output.out_dir
        self._limit: Trajectory | None = None

    def _row(self, experiment: ExperimentId, **values: Any) -> dict[str, Any]:
        return ResultRow(
            experiment=experiment,
            config_hash=self.config_hash,
            master_seed=self.master_seed,
        ).with_values(**values)

    def _table(
        self, experiment: ExperimentId, rows: list[dict[str, Any]]
    ) -> pd.DataFrame:
        columns = ROW_PREFIX + RESULT_COLUMNS[experiment]
        table = pd.DataFrame(rows, columns=columns)
        keys = [key for key in ("N", "seed", "species", "t") if key in columns]
        if keys and not table.empty:
            table = table.sort_values(keys, kind="mergesort").reset_index(drop=True)
        return table

    # Preflight

    def preflight(self, experiment: ExperimentId) -> None:
        """Admissibility checks, then the small-data monitor on the limit system.

        While the monitor trips and ``auto_scale_interaction`` is on, a_ij is
        halved, at most ``max_scale_halvings`` times.
        """
        require_admissible(validate_model(self.config.model), "model parameters")
        scaling = self.config.scaling
        every_N = {*scaling.N_list, *scaling.reg_N_list, *scaling.variance_N_list}
        for N in sorted(every_N):
            require_admissible(
                validate_scaling(self.config.scaling_for(N)),
                f"scaling parameters at N={N}",
            )
        if experiment not in SMALL_DATA_PREFLIGHT:
            return

        for halvings in range(self.config.max_scale_halvings + 1):
            tripped = self._small_data_trips()
            if not tripped:
                return
            if not self.config.auto_scale_interaction:
                logger.warning("Small-data monitor tripped; interaction left unscaled")
                return
            if halvings == self.config.max_scale_halvings:
                logger.warning(
                    f"Small-data monitor still trips after {halvings} halvings of a_ij"
                )
                return
            self.interaction_scale *= 0.5
            self.model = self.config.model.scaled_interaction(self.interaction_scale)
            self._limit = None
            logger.warning(
                f"Small-data monitor tripped; interaction scaled by "
                f"{self.interaction_scale:g}"
            )

    def _small_data_trips(self) -> bool:
        try:
            trajectory = self.limit_trajectory()
        except SolverBlowupError:
            return True
        return small_data_tripped(trajectory)

    # Shared runs

    def limit_trajectory(self) -> Trajectory:
        if self._limit is None:
            self._limit = self.solve(self.u0, self.solver_config())
        return self._limit

    def regularized_trajectories(
        self, N_list: Sequence[int], model: ModelParams | None = None
    ) -> dict[int, Trajectory | Exception]:
        """Regularized solutions per N; failures are kept as the exception"""

        def solve_for(N: int) -> Trajectory | Exception:
            try:
                return self.solve(self.u0, self.solver_config(self.family(N)), model)
            except ROW_FAILURES as e:
                logger.error(f"Regularized solve failed at N={N}: {e}")
                return e

        results = self.run_tasks(solve_for, N_list, desc="regularized")
        return dict(zip(N_list, results, strict=True))

    def particle_run(
        self, N: int, seed: int, model: ModelParams | None = None
    ) -> tuple[ParticleEnsemble, ParticleRun]:
        settings = self.config.particles
        stream = RngStream(master_seed=seed)
        ensemble = init_from_density(self.u0, N, stream)
        run = simulate(
            ensemble,
            model or self.model,
            self.family(N),
            dt=settings.dt,
            T=self.config.solver.T,
            stream=stream,
            snapshot_times=self.config.solver.snapshot_times(),
            drift=settings.drift,
            jump_cap=settings.jump_cap,
        )
        return ensemble, run

    def _tasks(self, N_list: Sequence[int]) -> list[tuple[int, int]]:
        return [(N, seed) for N in N_list for seed in self.config.seeds.seeds()]

    # Drivers

    def simulate_particles(self) -> ExperimentResult:
        experiment = ExperimentId.SIMULATE_PARTICLES
        rho = self.config.scaling.rho
        output = self.config.output

        def task(item: tuple[int, int]) -> tuple[list[dict[str, Any]], bool]:
            N, seed = item
            try:
                ensemble, run = self.particle_run(N, seed)
                family = self.family(N)
                gap, flag = initial_condition_gap(
                    ensemble,
                    self.u0,
                    family,
                    derived_scales(family.scaling).delta_N,
                    rho,
                )
            except ROW_FAILURES as e:
                logger.error(f"Particle run failed at N={N}, seed={seed}: {e}")
                failed = [
                    self._row(experiment, N=N, seed=seed, species=i + 1, failed=True)
                    for i in range(self.model.n)
                ]
                return failed, True
            final = run.final
            if self.config.particles.write_positions:
                write_positions_csv(
                    self.out_dir / "positions" / f"N{N}_seed{seed}.csv", final
                )
            if output.write_snapshots and run.fields:
                write_field_binary(
                    self.out_dir / "fields" / f"N{N}_seed{seed}.bin", run.fields[-1]
                )
            half = 0.5 * self.grid.L
            consistent = final.counts == run.initial.counts and all(
                bool(np.all((x >= -half) & (x < half))) for x in final.positions
            )
            rows = [
                self._row(
                    experiment,
                    N=N,
                    seed=seed,
                    species=i + 1,
                    count=final.counts[i],
                    mass=final.masses()[i],
                    max_displacement=max(
                        (r.max_displacement[i] for r in run.records), default=0.0
                    ),
                    large_jumps=sum(r.large_jumps[i] for r in run.records),
                    capped_jumps=run.capped_jumps,
                    initial_gap=gap,
                    initial_gap_flag=flag,
                    failed=False,
                )
                for i in range(final.n)
            ]
            return rows, consistent

        results = self.run_tasks(
            task, self._tasks(self.config.scaling.N_list), "particles"
        )
        table = self._table(experiment, [row for rows, _ in results for row in rows])
        checks = [
            Check(name="no_failed_rows", passed=not bool(table["failed"].any())),
            Check(
                name="particles_conserved",
                passed=all(consistent for _, consistent in results),
                detail="counts unchanged and positions inside the torus",
            ),
        ]
        return ExperimentResult(experiment, table, checks)

    def solve_pde(self) -> ExperimentResult:
        experiment = ExperimentId.SOLVE_PDE
        runs: dict[int, Trajectory | Exception] = {0: self.limit_trajectory()}
        runs.update(self.regularized_trajectories(self.config.scaling.N_list))
        peak = float(np.max(self.u0.values))

        rows = []
        checks = []
        for N, trajectory in runs.items():
            label = "limit" if N == 0 else f"N{N}"
            if isinstance(trajectory, Exception):
                checks.append(
                    Check(
                        name=f"{label}_completed", passed=False, detail=str(trajectory)
                    )
                )
                continue
            self._write_trajectory(trajectory, label)
            for record in trajectory.monitors:
                for i in range(self.model.n):
                    rows.append(
                        self._row(
                            experiment,
                            N=N,
                            t=record.t,
                            species=i + 1,
                            mass=record.mass[i],
                            min=record.min_value[i],
                            hs_proxy=record.hs_proxy[i],
                        )
                    )
            first, last = trajectory.monitors[0], trajectory.monitors[-1]
            drift = max(
                abs(b - a) / max(abs(a), 1e-300)
                for a, b in zip(first.mass, last.mass, strict=True)
            )
            floor = min(min(record.min_value) for record in trajectory.monitors)
            hs = np.array([record.hs_proxy for record in trajectory.monitors])
            checks.extend(
                [
                    Check(
                        name=f"{label}_mass_conserved",
                        passed=drift <= MASS_RTOL,
                        detail=f"relative drift {drift:.3g}",
                    ),
                    Check(
                        name=f"{label}_min_value",
                        passed=floor >= -UNDERSHOOT * peak,
                        detail=f"minimum {floor:.3g}",
                    ),
                    Check(
                        name=f"{label}_hs_bounded",
                        passed=bool(np.all(np.isfinite(hs))),
                        detail=f"max H^s proxy {float(np.max(hs)):.6g}",
                    ),
                ]
            )

        table = self._table(experiment, rows)
        series = {}
        limit = runs[0]
        if isinstance(limit, Trajectory):
            frame = limit.monitors_frame()
            series["hs_proxy_limit"] = frame[["t", "hs_proxy_1"]]
            series["min_limit"] = frame[["t", "min_1"]]
        return ExperimentResult(experiment, table, checks, series)

    def _write_trajectory(self, trajectory: Trajectory, label: str) -> None:
        directory = self.out_dir / label
        write_monitors_csv(directory / "monitors.csv", trajectory)
        write_run_metadata_json(
            directory / "run_metadata.json",
            trajectory,
            {
                "config_hash": self.config_hash,
                "master_seed": self.master_seed,
                "interaction_scale": self.interaction_scale,
                "model": self.model.model_dump(),
                "solver": self.config.solver.model_dump(),
            },
        )
        if self.config.output.write_snapshots:
            write_snapshots(directory / "snapshots", trajectory)
            if self.grid.d == 1:
                write_field_csv(directory / "final.csv", trajectory.final)

    def converge_n(self) -> ExperimentResult:
        experiment = ExperimentId.CONVERGE_N
        N_list = self.config.scaling.N_list
        rho = self.config.scaling.rho
        regularized = self.regularized_trajectories(N_list)

        def task(item: tuple[int, int]) -> dict[str, Any]:
            N, seed = item
            family = self.family(N)
            scales = derived_scales(family.scaling)
            base = {
                "N": N,
                "seed": seed,
                "kappa_N": scales.kappa_N,
                "kappa_hat_N": scales.kappa_hat_N,
                "delta_N": scales.delta_N,
            }
            trajectory = regularized[N]
            if isinstance(trajectory, Exception):
                return self._row(experiment, **base, failed=True)
            try:
                ensemble, run = self.particle_run(N, seed)
                gap, flag = initial_condition_gap(
                    ensemble, self.u0, family, scales.delta_N, rho
                )
                norm_sq = trajectory_norm(
                    paired_from_trajectories(run, trajectory), self.model.alpha
                )
            except ROW_FAILURES as e:
                logger.error(f"converge-n failed at N={N}, seed={seed}: {e}")
                return self._row(experiment, **base, failed=True)
            return self._row(
                experiment,
                **base,
                norm_sq=norm_sq,
                exceeds=norm_sq >= scales.delta_N,
                initial_gap=gap,
                initial_gap_flag=flag,
                failed=False,
            )

        rows = self.run_tasks(task, self._tasks(N_list), "converge-n")
        table = self._table(experiment, rows)
        ok = succeeded(table, norm_sq=float, exceeds=float, initial_gap_flag=float)
        grouped = ok.groupby("N")
        medians = grouped["norm_sq"].median().reindex(N_list)
        exceedance = grouped["exceeds"].mean().reindex(N_list)
        checks = [
            Check(name="no_failed_rows", passed=not bool(table["failed"].any())),
            Check(
                name="median_decreasing",
                passed=strictly_decreasing(medians.to_numpy()),
                detail=f"medians {medians.to_list()}",
            ),
            Check(
                name="exceedance_not_increasing",
                passed=non_increasing(exceedance.to_numpy()),
                detail=f"fractions {exceedance.to_list()}",
            ),
        ]
        series = {
            "median_norm_sq": pd.DataFrame(
                {"N": N_list, "median_norm_sq": medians.to_numpy()}
            ),
            "exceedance": pd.DataFrame(
                {"N": N_list, "exceedance": exceedance.to_numpy()}
            ),
        }
        summary = {
            "median_norm_sq": by_N(N_list, medians),
            "exceedance_fraction": by_N(N_list, exceedance),
            "initial_gap_flag_fraction": float(ok["initial_gap_flag"].mean())
            if not ok.empty
            else float("nan"),
        }
        return ExperimentResult(experiment, table, checks, series, summary)

    def converge_reg(self) -> ExperimentResult:
        experiment = ExperimentId.CONVERGE_REG
        N_list = self.config.scaling.reg_N_list
        limit = self.limit_trajectory()
        regularized = self.regularized_trajectories(N_list)

        rows = []
        for N in N_list:
            kappa_hat_N = self.family(N).kappa_hat_N
            trajectory = regularized[N]
            if isinstance(trajectory, Exception):
                rows.append(
                    self._row(experiment, N=N, kappa_hat_N=kappa_hat_N, failed=True)
                )
                continue
            norm_sq = trajectory_norm(
                paired_from_trajectories(trajectory, limit), self.model.alpha
            )
            rows.append(
                self._row(
                    experiment,
                    N=N,
                    kappa_hat_N=kappa_hat_N,
                    norm_sq=norm_sq,
                    failed=False,
                )
            )

        table = self._table(experiment, rows)
        norms = table["norm_sq"].to_numpy(dtype=np.float64)
        coincide = bool(np.all(norms <= NORM_FLOOR))
        slope = loglog_slope(table["kappa_hat_N"], norms)
        checks = [
            Check(name="no_failed_rows", passed=not bool(table["failed"].any())),
            Check(
                name="norm_decreasing",
                passed=strictly_decreasing(norms),
                detail=f"norms {norms.tolist()}",
            ),
            Check(
                name="negative_loglog_slope",
                passed=coincide or bool(slope < 0.0),
                detail=f"slope of log norm^2 against log kappa_hat_N: {slope:.4g}",
            ),
        ]
        series = {"norm_sq": table[["kappa_hat_N", "norm_sq"]]}
        return ExperimentResult(
            experiment, table, checks, series, {"loglog_slope": slope}
        )

    def theorem2_probe(self) -> ExperimentResult:
        experiment = ExperimentId.THEOREM2_PROBE
        N_list = self.config.scaling.N_list
        limit = self.limit_trajectory()
        study = self.config.study
        dictionary = bl_dictionary(self.grid, study.bl_modes, study.bl_tents)

        def task(item: tuple[int, int]) -> list[dict[str, Any]]:
            N, seed = item
            try:
                _, run = self.particle_run(N, seed)
            except ROW_FAILURES as e:
                logger.error(f"theorem2-probe failed at N={N}, seed={seed}: {e}")
                return [
                    self._row(experiment, N=N, seed=seed, species=i + 1, failed=True)
                    for i in range(self.model.n)
                ]
            rows = []
            for i in range(self.model.n):
                distance = sup_bl_distance(
                    [snapshot.positions[i] for snapshot in run.snapshots],
                    run.initial.weight,
                    limit.snapshots,
                    i,
                    dictionary,
                )
                rows.append(
                    self._row(
                        experiment,
                        N=N,
                        seed=seed,
                        species=i + 1,
                        bl_sup=distance,
                        failed=False,
                    )
                )
            return rows

        results = self.run_tasks(task, self._tasks(N_list), "theorem2-probe")
        table = self._table(experiment, [row for rows in results for row in rows])
        ok = succeeded(table, bl_sup=float)
        medians = ok.groupby("N")["bl_sup"].median().reindex(N_list)
        checks = [
            Check(name="no_failed_rows", passed=not bool(table["failed"].any())),
            Check(
                name="median_decreasing",
                passed=strictly_decreasing(medians.to_numpy()),
                detail=f"medians {medians.to_list()}",
            ),
        ]
        series = {
            "median_bl_sup": pd.DataFrame(
                {"N": N_list, "median_bl_sup": medians.to_numpy()}
            )
        }
        summary = {
            "median_bl_sup": by_N(N_list, medians),
            "dictionary_size": dictionary.size,
        }
        return ExperimentResult(experiment, table, checks, series, summary)

    def variance_study(self) -> ExperimentResult:
        experiment = ExperimentId.VARIANCE_STUDY
        N_list = self.config.scaling.variance_N_list
        study = self.config.study
        seeds = [self.master_seed + k for k in range(study.variance_seeds)]

        def task(N: int) -> pd.DataFrame:
            return empirical_force_variance(
                self.config.model,
                [self.config.scaling_for(N)],
                seeds,
                self.u0,
                study.variance_probe,
            )

        frame = pd.concat(self.run_tasks(task, N_list, "variance"), ignore_index=True)
        rows = [self._row(experiment, **record) for record in frame.to_dict("records")]
        table = self._table(experiment, rows)
        slope = loglog_slope(table["N"], table["variance"])
        bound = moderate_variance_exponent(
            self.config.scaling_for(N_list[0]), self.config.model.beta
        )
        checks = [
            Check(
                name="variance_decreasing",
                passed=strictly_decreasing(table["variance"].to_numpy()),
                detail=f"variances {table['variance'].tolist()}",
            ),
            Check(
                name="variance_decays",
                passed=bool(slope < 0.0),
                detail=f"log-log slope {slope:.4g}",
            ),
            Check(
                name="variance_within_moderate_bound",
                passed=bool(slope <= bound + VARIANCE_SLOPE_MARGIN),
                detail=f"slope {slope:.4g} against heuristic {bound:.4g}",
            ),
        ]
        series = {"variance": table[["N", "variance"]]}
        return ExperimentResult(
            experiment,
            table,
            checks,
            series,
            {"loglog_slope": slope, "heuristic_exponent": bound},
        )

    def sampler_validation(self) -> ExperimentResult:
        experiment = ExperimentId.VALIDATE_SAMPLER
        study = self.config.study
        model = self.config.model
        params = StableParams(
            alpha=model.alpha, d=model.d, sigma=model.sigma[0], dt=study.sampler_dt
        )
        stream = RngStream(master_seed=self.master_seed, purpose=StreamPurpose.SAMPLER)

        char = validate_sampler(params, study.sampler_xi, study.sampler_count, stream)
        semigroup = semigroup_check(
            params,
            SEMIGROUP_STEPS,
            stream,
            max(study.sampler_count // SEMIGROUP_STEPS, 1000),
            study.sampler_xi,
        )
        tail = tail_slope(
            sample_increments(params, stream.at(step=1), study.tail_count)
        )

        rows = []
        for record in char.to_dict("records"):
            rows.append(
                self._row(
                    experiment,
                    test="char_function",
                    **record,
                    z_score=(record["empirical"] - record["target"]) / record["stderr"],
                )
            )
        for record in semigroup.to_dict("records"):
            rows.append(
                self._row(
                    experiment,
                    test="semigroup",
                    xi=record["xi"],
                    target=record["target"],
                    empirical=record["summed"],
                    stderr=record["summed_stderr"],
                    z_score=(record["summed"] - record["target"])
                    / record["summed_stderr"],
                )
            )
        rows.append(
            self._row(
                experiment,
                test="tail_slope",
                xi=float("nan"),
                target=-params.index,
                empirical=tail,
                stderr=float("nan"),
                z_score=float("nan"),
            )
        )
        table = pd.DataFrame(rows, columns=ROW_PREFIX + RESULT_COLUMNS[experiment])
        z = table.loc[table["test"] == "char_function", "z_score"].abs()
        z_semi = table.loc[table["test"] == "semigroup", "z_score"].abs()
        checks = [
            Check(
                name="char_function_within_3se",
                passed=bool((z <= SAMPLER_Z).all()),
                detail=f"max |z| {float(z.max()):.3g}",
            ),
            Check(
                name="semigroup_within_3se",
                passed=bool((z_semi <= SAMPLER_Z).all()),
                detail=f"max |z| {float(z_semi.max()):.3g}",
            ),
            Check(
                name="tail_slope",
                passed=abs(tail + params.index) <= TAIL_SLOPE_TOLERANCE,
                detail=f"slope {tail:.4g}, expected {-params.index:.4g}",
            ),
        ]
        series = {"char_function": char[["xi", "empirical"]]}
        return ExperimentResult(experiment, table, checks, series, {"tail_slope": tail})

    def pure_diffusion(self) -> ExperimentResult:
        experiment = ExperimentId.PURE_DIFFUSION
        N_list = self.config.scaling.N_list
        model = self.config.model.without_interaction()
        heat = self.solve(self.u0, self.solver_config(), model)
        error = self._heat_error(heat, model)

        def task(item: tuple[int, int]) -> dict[str, Any]:
            N, seed = item
            try:
                _, run = self.particle_run(N, seed, model)
                norm_sq = trajectory_norm(
                    paired_from_trajectories(run, heat), model.alpha
                )
            except ROW_FAILURES as e:
                logger.error(f"pure-diffusion failed at N={N}, seed={seed}: {e}")
                return self._row(experiment, N=N, seed=seed, failed=True)
            return self._row(experiment, N=N, seed=seed, norm_sq=norm_sq, failed=False)

        table = self._table(
            experiment, self.run_tasks(task, self._tasks(N_list), "pure-diffusion")
        )
        ok = succeeded(table, norm_sq=float)
        medians = ok.groupby("N")["norm_sq"].median().reindex(N_list)
        checks = [
            Check(name="no_failed_rows", passed=not bool(table["failed"].any())),
            Check(
                name="heat_solution_exact",
                passed=error <= 1e-10,
                detail=f"max relative error {error:.3g}",
            ),
            Check(
                name="median_decreasing",
                passed=strictly_decreasing(medians.to_numpy()),
                detail=f"medians {medians.to_list()}",
            ),
        ]
        series = {
            "median_norm_sq": pd.DataFrame(
                {"N": N_list, "median_norm_sq": medians.to_numpy()}
            )
        }
        return ExperimentResult(
            experiment, table, checks, series, {"heat_error": error}
        )

    def _heat_error(self, heat: Trajectory, model: ModelParams) -> float:
        """Largest relative deviation of the solver from the exact multiplier"""
        _, abs_xi = wavenumbers(self.grid)
        scale = max(float(np.max(np.abs(self.u0.values))), 1e-300)
        worst = 0.0
        for t, u in zip(heat.times, heat.snapshots, strict=True):
            exact = np.stack(
                [
                    fourier_multiplier_apply(
                        self.u0.component(i),
                        np.exp(-sigma * abs_xi ** (2.0 * model.alpha) * t),
                        self.grid,
                    )
                    for i, sigma in enumerate(model.sigma)
                ]
            )
            worst = max(worst, float(np.max(np.abs(u.values - exact))) / scale)
        return worst

    # Entry point

    def execute(self, experiment: ExperimentId) -> ExperimentResult:
        """Preflight and run one driver; artifacts go under out_dir/<experiment>.

        Raises AdmissibilityError before any run when validation fails.
        """
        experiment = ExperimentId(experiment)
        self.out_dir = self.config.output.out_dir / experiment.value
        self.preflight(experiment)
        drivers = {
            ExperimentId.SIMULATE_PARTICLES: self.simulate_particles,
            ExperimentId.SOLVE_PDE: self.solve_pde,
            ExperimentId.CONVERGE_N: self.converge_n,
            ExperimentId.CONVERGE_REG: self.converge_reg,
            ExperimentId.THEOREM2_PROBE: self.theorem2_probe,
            ExperimentId.VARIANCE_STUDY: self.variance_study,
            ExperimentId.VALIDATE_SAMPLER: self.sampler_validation,
            ExperimentId.PURE_DIFFUSION: self.pure_diffusion,
        }
        return drivers[experiment]()

    @log_operation()
    def run(self, experiment: ExperimentId) -> Verdict:
        """Execute one experiment and write results.csv, *.dat and verdict.json"""
        experiment = ExperimentId(experiment)
        started = time.perf_counter()
        result = self.execute(experiment)

        write_results_csv(self.out_dir / "results.csv", result.table)
        if self.config.output.write_dat:
            for name, series in result.series.items():
                write_dat(self.out_dir / f"{name}.dat", series)

        verdict = Verdict.from_checks(
            result.checks,
            experiment=experiment,
            config_hash=self.config_hash,
            master_seed=self.master_seed,
            wall_time_s=time.perf_counter() - started,
            interaction_scale=self.interaction_scale,
            summary=result.summary,
        )
        write_verdict_json(self.out_dir / "verdict.json", verdict)
        logger.info(
            f"{experiment.value}: {verdict.verdict}",
            extra={
                "context": {
                    "failed_checks": [c.name for c in verdict.checks if not c.passed]
                }
            },
        )
        return verdict


def preflight(cfg: ExperimentConfig, experiment: ExperimentId) -> ExperimentRunner:
    """Runner whose model has passed the admissibility and small-data checks"""
    runner = ExperimentRunner(cfg)
    runner.preflight(ExperimentId(experiment))
    return runner


def run_simulate_particles(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.SIMULATE_PARTICLES)


def run_solve_pde(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.SOLVE_PDE)


def run_converge_n(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.CONVERGE_N)


def run_converge_reg(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.CONVERGE_REG)


def run_theorem2_probe(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.THEOREM2_PROBE)


def run_variance_study(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.VARIANCE_STUDY)


def run_sampler_validation(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.VALIDATE_SAMPLER)


def run_pure_diffusion(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentRunner(cfg).execute(ExperimentId.PURE_DIFFUSION)


def run_experiment(cfg: ExperimentConfig, experiment: ExperimentId) -> Verdict:
    """Run one experiment end to end and return its verdict"""
    return ExperimentRunner(cfg).run(experiment)
