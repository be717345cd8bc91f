# xdiff_lab/frac_ops/grid.py
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from threading import RLock

import numpy as np
from cachetools import LRUCache, cached
from cachetools.keys import hashkey
from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator

from xdiff_lab.exceptions import FieldError


class PeriodicGrid(BaseModel):
    """Uniform discretization of the torus [-L/2, L/2)^d"""

    model_config = ConfigDict(frozen=True)

    d: int = PydanticField(ge=1, description="Spatial dimension")
    L: float = PydanticField(gt=0, description="Torus side length")
    M: int = PydanticField(description="Points per axis")

    @field_validator("M")
    @classmethod
    def validate_m(cls, v: int) -> int:
        if v < 4 or v % 2:
            raise ValueError(f"M must be even and >= 4, got {v}")
        return v

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.d

    @property
    def axes(self) -> tuple[int, ...]:
        """Trailing array axes holding the spatial dimensions"""
        return tuple(range(-self.d, 0))

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    @property
    def volume(self) -> float:
        return self.L**self.d

    def nodes(self) -> np.ndarray:
        """x_m = -L/2 + m h along one axis"""
        return -0.5 * self.L + self.h * np.arange(self.M)

    def mesh(self) -> tuple[np.ndarray, ...]:
        x = self.nodes()
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Map positions into [-L/2, L/2)"""
        return (x + 0.5 * self.L) % self.L - 0.5 * self.L

    def minimum_image(self, dx: np.ndarray) -> np.ndarray:
        return dx - self.L * np.round(dx / self.L)

    def with_M(self, M: int) -> "PeriodicGrid":
        return PeriodicGrid(d=self.d, L=self.L, M=M)


@cached(
    cache=LRUCache(maxsize=32),
    key=lambda grid: hashkey(grid.d, grid.L, grid.M),
    lock=RLock(),
)
def wavenumbers(grid: PeriodicGrid) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Per-axis angular wavenumbers xi = 2 pi k / L (broadcastable) and |xi|.

    Arrays are shared between callers and marked read-only.
    """
    k = np.fft.fftfreq(grid.M, d=1.0 / grid.M)
    xi_1d = 2.0 * np.pi * k / grid.L
    xi = []
    for axis in range(grid.d):
        shape = [1] * grid.d
        shape[axis] = grid.M
        component = xi_1d.reshape(shape)
        component.setflags(write=False)
        xi.append(component)
    abs_xi = np.sqrt(sum(component**2 for component in xi)) * np.ones(grid.shape)
    abs_xi.setflags(write=False)
    return tuple(xi), abs_xi


@cached(
    cache=LRUCache(maxsize=32),
    key=lambda grid: hashkey(grid.d, grid.L, grid.M),
    lock=RLock(),
)
def nyquist_mask(grid: PeriodicGrid) -> np.ndarray:
    """True off the Nyquist planes; odd multipliers must vanish on them"""
    k = np.fft.fftfreq(grid.M, d=1.0 / grid.M)
    keep_1d = np.abs(k) < grid.M // 2
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.d):
        shape = [1] * grid.d
        shape[axis] = grid.M
        mask = mask & keep_1d.reshape(shape)
    mask.setflags(write=False)
    return mask


@dataclass(frozen=True)
class Field:
    """Per-species real scalar fields sampled at the grid nodes.

    ``values`` has shape ``(n, M, ..., M)``.
    """

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if np.iscomplexobj(values):
            raise FieldError("Field values must be real")
        values = values.astype(np.float64, copy=False)
        if values.ndim != self.grid.d + 1 or values.shape[1:] != self.grid.shape:
            raise FieldError(
                f"Field shape {values.shape} does not match (n, *{self.grid.shape})"
            )
        if not np.all(np.isfinite(values)):
            raise FieldError("Field contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def component(self, i: int) -> np.ndarray:
        return self.values[i]

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def __sub__(self, other: "Field") -> "Field":
        if other.grid != self.grid or other.n != self.n:
            raise FieldError("Fields live on different grids or species counts")
        return Field(self.grid, self.values - other.values)

    @classmethod
    def zeros(cls, grid: PeriodicGrid, n: int) -> "Field":
        return cls(grid, np.zeros((n, *grid.shape)))

    @classmethod
    def from_functions(
        cls,
        grid: PeriodicGrid,
        functions: Sequence[Callable[..., np.ndarray]],
    ) -> "Field":
        """Sample one callable per species; each takes d coordinate arrays"""
        mesh = grid.mesh()
        values = np.stack(
            [np.broadcast_to(fn(*mesh), grid.shape) for fn in functions]
        ).astype(np.float64)
        return cls(grid, values)
