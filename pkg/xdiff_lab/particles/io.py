# xdiff_lab/particles/io.py
from pathlib import Path

import numpy as np
import pandas as pd

from xdiff_lab.particles.models import ParticleEnsemble


def positions_frame(ensemble: ParticleEnsemble) -> pd.DataFrame:
    """Columns ``species,index,x_1..x_d``; species are 1-based"""
    columns = [f"x_{axis + 1}" for axis in range(ensemble.d)]
    frames = []
    for i, x in enumerate(ensemble.positions):
        frame = pd.DataFrame(x, columns=columns)
        frame.insert(0, "index", np.arange(x.shape[0], dtype=np.int64))
        frame.insert(0, "species", i + 1)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["species", "index", *columns])
    return pd.concat(frames, ignore_index=True)


def write_positions_csv(path: str | Path, ensemble: ParticleEnsemble) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    positions_frame(ensemble).to_csv(path, index=False, float_format="%.17g")
    return path
