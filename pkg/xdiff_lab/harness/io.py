# xdiff_lab/harness/io.py
from pathlib import Path

import numpy as np
import pandas as pd

from xdiff_lab.harness.models import Verdict

FLOAT_FORMAT = "%.17g"


def write_results_csv(path: str | Path, table: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_verdict_json(path: str | Path, verdict: Verdict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(verdict.model_dump_json(indent=2))
    return path


def write_dat(path: str | Path, series: pd.DataFrame) -> Path:
    """Two whitespace-separated columns under a ``#`` header, gnuplot style"""
    if series.shape[1] != 2:
        raise ValueError(f"*.dat series need two columns, got {series.shape[1]}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = " ".join(str(column) for column in series.columns)
    np.savetxt(
        path,
        series.to_numpy(dtype=np.float64),
        fmt=FLOAT_FORMAT,
        header=header,
        comments="# ",
    )
    return path
