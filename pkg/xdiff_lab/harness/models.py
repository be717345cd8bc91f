# xdiff_lab/harness/models.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field


class ExperimentId(str, Enum):
    """CLI subcommands; each writes its own result table"""

    SIMULATE_PARTICLES = "simulate-particles"
    SOLVE_PDE = "solve-pde"
    CONVERGE_N = "converge-n"
    CONVERGE_REG = "converge-reg"
    THEOREM2_PROBE = "theorem2-probe"
    VARIANCE_STUDY = "variance-study"
    VALIDATE_SAMPLER = "validate-sampler"
    PURE_DIFFUSION = "pure-diffusion"


# Leading columns of every results.csv
ROW_PREFIX = ["experiment", "config_hash", "master_seed"]

# Measured columns per experiment, after ROW_PREFIX
RESULT_COLUMNS: dict[ExperimentId, list[str]] = {
    ExperimentId.SIMULATE_PARTICLES: [
        "N",
        "seed",
        "species",
        "count",
        "mass",
        "max_displacement",
        "large_jumps",
        "capped_jumps",
        "initial_gap",
        "initial_gap_flag",
        "failed",
    ],
    ExperimentId.SOLVE_PDE: ["N", "t", "species", "mass", "min", "hs_proxy"],
    ExperimentId.CONVERGE_N: [
        "N",
        "seed",
        "kappa_N",
        "kappa_hat_N",
        "delta_N",
        "norm_sq",
        "exceeds",
        "initial_gap",
        "initial_gap_flag",
        "failed",
    ],
    ExperimentId.CONVERGE_REG: ["N", "kappa_hat_N", "norm_sq", "failed"],
    ExperimentId.THEOREM2_PROBE: ["N", "seed", "species", "bl_sup", "failed"],
    ExperimentId.VARIANCE_STUDY: ["N", "kappa_N", "variance", "mean_force", "seeds"],
    ExperimentId.VALIDATE_SAMPLER: [
        "test",
        "xi",
        "target",
        "empirical",
        "stderr",
        "z_score",
    ],
    ExperimentId.PURE_DIFFUSION: ["N", "seed", "norm_sq", "failed"],
}


class ResultRow(BaseModel):
    """Provenance carried by every output row"""

    model_config = ConfigDict(frozen=True)

    experiment: ExperimentId
    config_hash: str
    master_seed: int

    def with_values(self, **values: Any) -> dict[str, Any]:
        return {
            "experiment": self.experiment.value,
            "config_hash": self.config_hash,
            "master_seed": self.master_seed,
            **values,
        }


class Check(BaseModel):
    """One machine-checkable assertion of an experiment"""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str = ""


class Verdict(BaseModel):
    """Contents of verdict.json"""

    experiment: ExperimentId
    verdict: str = Field(description="PASS or FAIL")
    checks: list[Check] = Field(default_factory=list)
    config_hash: str
    master_seed: int
    wall_time_s: float = 0.0
    interaction_scale: float = Field(
        default=1.0, description="Factor applied to a_ij by the preflight"
    )
    summary: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    @classmethod
    def from_checks(cls, checks: list[Check], **kwargs: Any) -> "Verdict":
        verdict = "PASS" if all(check.passed for check in checks) else "FAIL"
        return cls(verdict=verdict, checks=checks, **kwargs)


@dataclass
class ExperimentResult:
    """Table, checks and plot series produced by one experiment run"""

    experiment: ExperimentId
    table: pd.DataFrame
    checks: list[Check] = field(default_factory=list)
    series: dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
