# xdiff_lab/levy/models.py
from enum import IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class StreamPurpose(IntEnum):
    """First component of every substream key"""

    NOISE = 0
    INIT = 1
    SAMPLER = 2
    VARIANCE = 3
    SEMIGROUP = 4


class StableParams(BaseModel):
    """Law of one increment: E exp(i xi . dL) = exp(-sigma dt |xi|^{2 alpha})"""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(description="Half the stability index")
    d: int = Field(default=1, ge=1, description="Dimension")
    sigma: float = Field(gt=0, description="Diffusion coefficient")
    dt: float = Field(gt=0, description="Time step")
    jump_cap: float | None = Field(
        default=None, gt=0, description="Optional cap on |dL|; changes the law"
    )

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v: float) -> float:
        if not 0.5 < v < 1.0:
            raise ValueError(f"2 alpha must lie in (1, 2), got alpha={v}")
        return v

    @property
    def index(self) -> float:
        return 2.0 * self.alpha

    @property
    def scale(self) -> float:
        """Coefficient sigma dt of the characteristic exponent"""
        return self.sigma * self.dt

    def with_dt(self, dt: float) -> "StableParams":
        return self.model_copy(update={"dt": dt})

    def target_char_function(self, xi: np.ndarray) -> np.ndarray:
        xi = np.abs(np.asarray(xi, dtype=np.float64))
        return np.exp(-self.scale * xi**self.index)


class RngStream(BaseModel):
    """Counter-based substream keyed by (purpose, species, step).

    Particles of one species draw from the same substream in one block; the
    particle index is its lane within the block.
    """

    model_config = ConfigDict(frozen=True)

    master_seed: int = Field(ge=0, lt=2**64)
    purpose: StreamPurpose = Field(default=StreamPurpose.NOISE)
    species: int = Field(default=0, ge=0)
    step: int = Field(default=0, ge=0)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            self.master_seed,
            spawn_key=(int(self.purpose), self.species, self.step),
        )
        return np.random.Generator(np.random.Philox(sequence))

    def at(
        self,
        species: int | None = None,
        step: int | None = None,
        purpose: StreamPurpose | None = None,
    ) -> "RngStream":
        update: dict[str, int | StreamPurpose] = {}
        if species is not None:
            update["species"] = species
        if step is not None:
            update["step"] = step
        if purpose is not None:
            update["purpose"] = purpose
        return self.model_copy(update=update)
