# xdiff_lab/pde/models.py
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from xdiff_lab.config import SolverSettings
from xdiff_lab.frac_ops.grid import Field as GridField, PeriodicGrid
from xdiff_lab.kernels.models import MollifierFamily


class SolverConfig(BaseModel):
    """One pseudo-spectral run: grid, time stepping and the system solved.

    ``mode="regularized"`` solves the system smoothed by W_hat_N of
    ``family``; ``mode="limit"`` solves the unsmoothed limit system.
    """

    model_config = ConfigDict(frozen=True)

    grid: PeriodicGrid
    dt: float = Field(gt=0, description="Time step")
    T: float = Field(gt=0, description="Horizon")
    dealias: bool = Field(default=True, description="2/3-rule dealiasing")
    snapshot_times: list[float] = Field(default_factory=list)
    mode: Literal["regularized", "limit"] = "limit"
    family: MollifierFamily | None = Field(
        default=None, description="Kernels of the regularized system"
    )
    growth_limit: float = Field(default=10.0, gt=1)
    hs_order: float | None = Field(
        default=None, description="Sobolev order of the H^s monitor"
    )

    @model_validator(mode="after")
    def check_run(self) -> "SolverConfig":
        times = self.snapshot_times
        if any(t < 0.0 or t > self.T * (1.0 + 1e-12) for t in times):
            raise ValueError(f"Snapshot times must lie in [0, {self.T}]")
        if sorted(times) != list(times):
            raise ValueError("Snapshot times must be increasing")
        if self.mode == "regularized":
            if self.family is None:
                raise ValueError("Regularized mode needs a mollifier family")
            if self.family.d != self.grid.d:
                raise ValueError("Mollifier family and grid differ in dimension")
        return self

    def output_times(self) -> list[float]:
        """Snapshot times, or just the endpoints when none are configured"""
        return list(self.snapshot_times) or [0.0, self.T]

    @property
    def N(self) -> int | None:
        return self.family.N if self.family is not None else None

    @property
    def s(self) -> float:
        if self.hs_order is not None:
            return self.hs_order
        return self.grid.d / 2.0 + 2.5

    def with_dt(self, dt: float) -> "SolverConfig":
        return self.model_copy(update={"dt": dt})

    @classmethod
    def from_settings(
        cls,
        grid: PeriodicGrid,
        settings: SolverSettings,
        family: MollifierFamily | None = None,
    ) -> "SolverConfig":
        """Regularized when ``family`` is given, limit system otherwise"""
        return cls(
            grid=grid,
            dt=settings.dt,
            T=settings.T,
            dealias=settings.dealias,
            snapshot_times=settings.snapshot_times(),
            mode="regularized" if family is not None else "limit",
            family=family,
            growth_limit=settings.growth_limit,
            hs_order=settings.hs_order,
        )


class MonitorRecord(BaseModel):
    """Conservation, positivity and regularity monitors at one snapshot"""

    model_config = ConfigDict(frozen=True)

    t: float
    mass: list[float]
    min_value: list[float]
    hs_proxy: list[float]


@dataclass
class Trajectory:
    """Snapshots of one solver run with running norm accumulators.

    ``sup_l2_sq[k][i]`` is sup over the first k+1 snapshots of ||u_i||_2^2 and
    ``seminorm_integral[k][i]`` the trapezoidal integral of
    ||(-Delta)^{alpha/2} u_i||_2^2 up to ``times[k]``.
    """

    alpha: float
    times: list[float] = field(default_factory=list)
    snapshots: list[GridField] = field(default_factory=list)
    monitors: list[MonitorRecord] = field(default_factory=list)
    sup_l2_sq: list[np.ndarray] = field(default_factory=list)
    seminorm_integral: list[np.ndarray] = field(default_factory=list)
    dt: float = 0.0
    mode: str = "limit"
    N: int | None = None
    _last_seminorm: np.ndarray | None = field(default=None, repr=False)

    @property
    def grid(self) -> PeriodicGrid:
        return self.snapshots[0].grid

    @property
    def final(self) -> GridField:
        return self.snapshots[-1]

    def record(
        self,
        t: float,
        u: GridField,
        l2_sq: np.ndarray,
        seminorm_sq: np.ndarray,
        monitor: MonitorRecord,
    ) -> None:
        """Append a snapshot and advance the accumulators"""
        if self.times and t < self.times[-1]:
            raise ValueError(f"Snapshot at t={t} precedes t={self.times[-1]}")
        if not self.times:
            sup = l2_sq.copy()
            integral = np.zeros_like(seminorm_sq)
        else:
            sup = np.maximum(self.sup_l2_sq[-1], l2_sq)
            step = t - self.times[-1]
            integral = self.seminorm_integral[-1] + 0.5 * step * (
                self._last_seminorm + seminorm_sq
            )
        self.times.append(t)
        self.snapshots.append(u)
        self.monitors.append(monitor)
        self.sup_l2_sq.append(sup)
        self.seminorm_integral.append(integral)
        self._last_seminorm = seminorm_sq

    def norm_squared(self) -> np.ndarray:
        """Per-species ||u_i||^2_{[0,T]} over the recorded snapshots"""
        return self.sup_l2_sq[-1] + self.seminorm_integral[-1]

    def monitors_frame(self) -> pd.DataFrame:
        """Columns ``t,mass_1..,min_1..,hs_proxy_1..``"""
        rows = []
        for record in self.monitors:
            row: dict[str, float] = {"t": record.t}
            for prefix, values in (
                ("mass", record.mass),
                ("min", record.min_value),
                ("hs_proxy", record.hs_proxy),
            ):
                for i, value in enumerate(values):
                    row[f"{prefix}_{i + 1}"] = value
            rows.append(row)
        return pd.DataFrame(rows)
