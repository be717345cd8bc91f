# xdiff_lab/pde/io.py
import json
from pathlib import Path
from typing import Any

from xdiff_lab.frac_ops.io import write_field_binary
from xdiff_lab.pde.models import Trajectory


def write_monitors_csv(path: str | Path, trajectory: Trajectory) -> Path:
    """Columns ``t,mass_1..,min_1..,hs_proxy_1..``"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory.monitors_frame().to_csv(path, index=False, float_format="%.17g")
    return path


def write_run_metadata_json(
    path: str | Path, trajectory: Trajectory, config: dict[str, Any] | None = None
) -> Path:
    """Config echo plus the monitor time series and final norm accumulators"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": config or {},
        "mode": trajectory.mode,
        "N": trajectory.N,
        "dt": trajectory.dt,
        "alpha": trajectory.alpha,
        "times": trajectory.times,
        "monitors": [record.model_dump() for record in trajectory.monitors],
        "norm_squared": trajectory.norm_squared().tolist(),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    return path


def write_snapshots(directory: str | Path, trajectory: Trajectory) -> list[Path]:
    """One binary field file per snapshot, named by its index"""
    directory = Path(directory)
    return [
        write_field_binary(directory / f"snapshot_{k:04d}.bin", u)
        for k, u in enumerate(trajectory.snapshots)
    ]
