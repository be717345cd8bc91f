# xdiff_lab/metrics/models.py
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from xdiff_lab.exceptions import AlignmentError, FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid


@dataclass(frozen=True)
class Measure:
    """Finite signed measure sum_m w_m delta_{x_m} on the torus.

    Gridded densities are represented by their node values times the cell
    volume, so pairing with a test function is the midpoint rule.
    """

    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.broadcast_to(
            np.asarray(self.weights, dtype=np.float64), points.shape[:1]
        ).copy()
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(weights))):
            raise FieldError("Measure has non-finite atoms or weights")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))


class BLDictionary(BaseModel):
    """Finite family of test functions with ||psi||_inf + ||grad psi||_inf <= 1.

    * Fourier modes c cos(xi . x), c sin(xi . x) with |k_l| <= ``modes`` and
      c = 1 / (1 + |xi|);
    * cones of height r / (1 + r) and radius r centred on a lattice of
      ``centers_per_axis`` nodes per axis;
    * signed pairs of such cones, one lattice shift of 2r apart along an axis.

    Radii follow a geometric ladder with ``widths_per_octave`` steps per
    doubling, rounded to whole lattice shifts.
    """

    model_config = ConfigDict(frozen=True)

    L: float = PydanticField(gt=0)
    d: int = PydanticField(ge=1)
    modes: int = PydanticField(default=32, ge=0)
    centers_per_axis: int = PydanticField(default=64, ge=2)
    widths_per_octave: int = PydanticField(default=4, ge=1)

    @property
    def spacing(self) -> float:
        return self.L / self.centers_per_axis

    def wave_vectors(self) -> np.ndarray:
        """Integer wave vectors in a half-space (plus 0), shape (K, d)"""
        axis = np.arange(-self.modes, self.modes + 1)
        grid = np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"), axis=-1)
        k = grid.reshape(-1, self.d)
        first = np.argmax(k != 0, axis=1)
        leading = k[np.arange(k.shape[0]), first]
        return k[(leading > 0) | np.all(k == 0, axis=1)]

    def centers(self) -> np.ndarray:
        """Lattice centres, shape (centers_per_axis^d, d), first axis major"""
        nodes = -0.5 * self.L + self.spacing * np.arange(self.centers_per_axis)
        mesh = np.meshgrid(*([nodes] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.d)

    def shifts(self) -> list[int]:
        """Lattice shifts 2r / spacing of the cone radii, up to half the torus"""
        limit = self.centers_per_axis // 2
        shifts: list[int] = []
        k = 0
        while True:
            j = int(round(2.0 ** (k / self.widths_per_octave)))
            if j > limit:
                break
            if not shifts or j != shifts[-1]:
                shifts.append(j)
            k += 1
        return shifts

    def radii(self) -> np.ndarray:
        return 0.5 * self.spacing * np.asarray(self.shifts(), dtype=np.float64)

    @property
    def size(self) -> int:
        """Number of test functions, counting cos and sin separately"""
        n_modes = 2 * self.wave_vectors().shape[0] - 1
        n_centers = self.centers_per_axis**self.d
        n_radii = len(self.shifts())
        return n_modes + n_radii * n_centers * (1 + self.d)


@dataclass(frozen=True)
class PairedTrajectory:
    """Two time-aligned sequences of fields on one grid"""

    times: tuple[float, ...]
    first: tuple[Field, ...] = field(repr=False)
    second: tuple[Field, ...] = field(repr=False)

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.first) == len(self.second)):
            raise AlignmentError(
                "Paired trajectories need one field per snapshot time",
                details={
                    "times": len(self.times),
                    "first": len(self.first),
                    "second": len(self.second),
                },
            )
        if not self.times:
            raise AlignmentError("Paired trajectories are empty")
        if any(b < a for a, b in zip(self.times, self.times[1:], strict=False)):
            raise AlignmentError("Snapshot times must be non-decreasing")
        grid = self.first[0].grid
        for u, v in zip(self.first, self.second, strict=True):
            if u.grid != grid or v.grid != grid:
                raise AlignmentError("Paired fields live on different grids")
            if u.n != v.n:
                raise AlignmentError(f"Paired fields carry {u.n} and {v.n} species")

    @property
    def grid(self) -> PeriodicGrid:
        return self.first[0].grid

    def differences(self) -> list[Field]:
        return [u - v for u, v in zip(self.first, self.second, strict=True)]

