# xdiff_lab/particles/models.py
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from xdiff_lab.exceptions import FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid


@dataclass(frozen=True)
class ParticleEnsemble:
    """Positions of every particle of every species at one time.

    ``positions[i]`` has shape (N_i, d) and lies in [-L/2, L/2)^d; each
    particle carries weight 1/N.
    """

    grid: PeriodicGrid
    N: int
    positions: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self) -> None:
        if self.N < 1:
            raise FieldError(f"Scaling parameter N must be positive, got {self.N}")
        checked = []
        for i, x in enumerate(self.positions):
            x = np.asarray(x, dtype=np.float64).reshape(-1, self.grid.d)
            if not np.all(np.isfinite(x)):
                raise FieldError(f"Species {i} has non-finite positions")
            checked.append(x)
        object.__setattr__(self, "positions", tuple(checked))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def d(self) -> int:
        return self.grid.d

    @property
    def counts(self) -> list[int]:
        return [int(x.shape[0]) for x in self.positions]

    @property
    def weight(self) -> float:
        return 1.0 / self.N

    def masses(self) -> list[float]:
        """<S_i^N, 1> = N_i / N"""
        return [count / self.N for count in self.counts]

    def with_positions(self, positions: list[np.ndarray]) -> "ParticleEnsemble":
        return ParticleEnsemble(self.grid, self.N, tuple(positions))

    @classmethod
    def empty(cls, grid: PeriodicGrid, N: int, n: int) -> "ParticleEnsemble":
        return cls(grid, N, tuple(np.empty((0, grid.d)) for _ in range(n)))


class StepRecord(BaseModel):
    """Per-step bookkeeping of the Euler-Maruyama stepper"""

    model_config = ConfigDict(frozen=True)

    time: float = PydanticField(description="Time at the end of the step")
    max_displacement: list[float] = PydanticField(description="Per species")
    large_jumps: list[int] = PydanticField(
        description="Per species, jumps longer than half the W_N standard deviation"
    )
    capped_jumps: int = PydanticField(default=0, description="Jumps shortened by a cap")


@dataclass
class ParticleRun:
    """Snapshots, deposited h^N fields and step records of one simulation.

    With ``record_steps`` the left-endpoint positions and forces of every
    step are kept for the generator check.
    """

    times: list[float] = field(default_factory=list)
    snapshots: list[ParticleEnsemble] = field(default_factory=list)
    fields: list[Field] = field(default_factory=list)
    records: list[StepRecord] = field(default_factory=list)
    dt: float = 0.0
    step_positions: list[tuple[np.ndarray, ...]] = field(default_factory=list)
    step_forces: list[list[np.ndarray]] = field(default_factory=list)

    @property
    def initial(self) -> ParticleEnsemble:
        return self.snapshots[0]

    @property
    def final(self) -> ParticleEnsemble:
        return self.snapshots[-1]

    @property
    def capped_jumps(self) -> int:
        return sum(record.capped_jumps for record in self.records)


class GeneratorCheckResult(BaseModel):
    """Seed averages of both sides of the weak Ito identity"""

    model_config = ConfigDict(frozen=True)

    lhs: float = PydanticField(description="<S(T), psi> - <S(0), psi>")
    rhs: float = PydanticField(description="Time quadrature of the generator term")
    residual: float = PydanticField(description="Mean of lhs - rhs")
    stderr: float = PydanticField(
        description="Seed-ensemble standard error of lhs - rhs"
    )
    runs: int

    @property
    def within(self) -> bool:
        """|lhs - rhs| <= 3 SE"""
        return abs(self.residual) <= 3.0 * self.stderr
