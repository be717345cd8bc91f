# xdiff_lab/frac_ops/io.py
"""Field serialization.

Binary layout (little-endian): int64 d, int64 M, float64 L, int64 n, then the
n * M^d values as float64 in row-major (C) order, species first.
"""

from pathlib import Path

import numpy as np
import pandas as pd

from xdiff_lab.exceptions import FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid

HEADER_BYTES = 32


def field_to_bytes(field: Field) -> bytes:
    grid = field.grid
    header = (
        np.array([grid.d, grid.M], dtype="<i8").tobytes()
        + np.array([grid.L], dtype="<f8").tobytes()
        + np.array([field.n], dtype="<i8").tobytes()
    )
    return header + np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C")


def field_from_bytes(payload: bytes) -> Field:
    if len(payload) < HEADER_BYTES:
        raise FieldError("Truncated field header")
    d, M = (int(v) for v in np.frombuffer(payload, dtype="<i8", count=2, offset=0))
    L = float(np.frombuffer(payload, dtype="<f8", count=1, offset=16)[0])
    n = int(np.frombuffer(payload, dtype="<i8", count=1, offset=24)[0])
    grid = PeriodicGrid(d=d, L=L, M=M)
    count = n * M**d
    if len(payload) != HEADER_BYTES + 8 * count:
        raise FieldError(
            f"Field payload holds {len(payload) - HEADER_BYTES} bytes, "
            f"expected {8 * count}"
        )
    values = np.frombuffer(payload, dtype="<f8", count=count, offset=HEADER_BYTES)
    return Field(grid, values.astype(np.float64).reshape((n, *grid.shape)))


def write_field_binary(path: str | Path, field: Field) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(field_to_bytes(field))
    return path


def read_field_binary(path: str | Path) -> Field:
    return field_from_bytes(Path(path).read_bytes())


def write_field_csv(path: str | Path, field: Field) -> Path:
    """Columns ``x,u_1..u_n``; one-dimensional fields only"""
    if field.grid.d != 1:
        raise FieldError("CSV field export is defined for d = 1 only")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"x": field.grid.nodes()})
    for i in range(field.n):
        frame[f"u_{i + 1}"] = field.values[i]
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
