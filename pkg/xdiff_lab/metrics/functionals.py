# xdiff_lab/metrics/functionals.py
from collections.abc import Sequence
from typing import Any

import numpy as np
from scipy.integrate import trapezoid

from xdiff_lab.exceptions import AlignmentError, FieldError
from xdiff_lab.frac_ops.grid import Field, PeriodicGrid
from xdiff_lab.frac_ops.operators import power_symbol, spectral_energy
from xdiff_lab.logger import LabLogger, log_operation
from xdiff_lab.metrics.models import BLDictionary, Measure, PairedTrajectory

logger = LabLogger().get_logger(__name__)

# Upper bound on (atoms x dictionary entries) evaluated per chunk
PAIRING_BUDGET = 2**22


def point_measure(
    points: np.ndarray | Sequence[float], weights: float | np.ndarray | None = None
) -> Measure:
    """Weighted point set; equal weights summing to 1 by default"""
    points = np.asarray(points, dtype=np.float64)
    count = points.shape[0]
    if weights is None:
        weights = 1.0 / count if count else 0.0
    return Measure(points, weights)


def grid_measure(component: np.ndarray, grid: PeriodicGrid) -> Measure:
    """Density sampled at the grid nodes, one atom per node"""
    component = np.asarray(component, dtype=np.float64)
    if component.shape != grid.shape:
        raise FieldError(f"Density shape {component.shape} is not {grid.shape}")
    nodes = np.stack([axis.ravel() for axis in grid.mesh()], axis=-1)
    return Measure(nodes, component.ravel() * grid.cell_volume)


def bl_dictionary(
    grid: PeriodicGrid, modes: int = 32, tents: int = 64, widths_per_octave: int = 4
) -> BLDictionary:
    """Dictionary for ``grid``'s torus with about ``tents`` cone centres"""
    per_axis = max(2, int(round(tents ** (1.0 / grid.d))))
    return BLDictionary(
        L=grid.L,
        d=grid.d,
        modes=modes,
        centers_per_axis=per_axis,
        widths_per_octave=widths_per_octave,
    )


def _fourier_pairing(measure: Measure, dictionary: BLDictionary) -> np.ndarray:
    k = dictionary.wave_vectors()
    xi = 2.0 * np.pi * k / dictionary.L
    scale = 1.0 / (1.0 + np.linalg.norm(xi, axis=1))
    total = np.zeros(k.shape[0], dtype=np.complex128)
    step = max(1, PAIRING_BUDGET // max(k.shape[0], 1))
    for start in range(0, measure.points.shape[0], step):
        x = measure.points[start : start + step]
        w = measure.weights[start : start + step]
        total += np.exp(1j * (x @ xi.T)).T @ w
    cos = scale * total.real
    sin = scale * total.imag
    keep_sin = np.any(k != 0, axis=1)
    return np.concatenate([cos, sin[keep_sin]])


def _cone_sums(measure: Measure, dictionary: BLDictionary) -> np.ndarray:
    """G[r, c] = sum_m w_m max(0, 1 - |x_m - c| / r) over radii and centres"""
    centers = dictionary.centers()
    radii = dictionary.radii()
    L = dictionary.L
    sums = np.zeros((radii.size, centers.shape[0]))
    step = max(1, PAIRING_BUDGET // max(centers.shape[0], 1))
    for start in range(0, measure.points.shape[0], step):
        x = measure.points[start : start + step]
        w = measure.weights[start : start + step]
        dx = x[:, None, :] - centers[None, :, :]
        dx -= L * np.round(dx / L)
        dist = np.sqrt(np.sum(dx**2, axis=-1))
        for index, r in enumerate(radii):
            sums[index] += w @ np.maximum(0.0, 1.0 - dist / r)
    return sums


def _cone_pairing(measure: Measure, dictionary: BLDictionary) -> np.ndarray:
    sums = _cone_sums(measure, dictionary)
    radii = dictionary.radii()
    heights = radii / (1.0 + radii)
    lattice = (dictionary.centers_per_axis,) * dictionary.d
    blocks = []
    for index, shift in enumerate(dictionary.shifts()):
        values = sums[index].reshape(lattice)
        blocks.append(heights[index] * values.ravel())
        for axis in range(dictionary.d):
            partner = np.roll(values, -shift, axis=axis)
            blocks.append(heights[index] * (values - partner).ravel())
    return np.concatenate(blocks) if blocks else np.zeros(0)


def dictionary_pairing(measure: Measure, dictionary: BLDictionary) -> np.ndarray:
    """<measure, psi> for every dictionary element, in a fixed order"""
    if measure.d != dictionary.d:
        raise FieldError(
            f"Measure is {measure.d}-dimensional, dictionary is {dictionary.d}"
        )
    return np.concatenate(
        [_fourier_pairing(measure, dictionary), _cone_pairing(measure, dictionary)]
    )


def bl_metric(
    nu1: Measure,
    nu2: Measure,
    dictionary: BLDictionary | None = None,
    grid: PeriodicGrid | None = None,
) -> float:
    """max over the dictionary of |<nu1 - nu2, psi>|.

    Every element has ||psi||_inf + ||grad psi||_inf <= 1, so the value is a
    lower bound of the bounded-Lipschitz distance.
    """
    if dictionary is None:
        if grid is None:
            raise FieldError("bl_metric needs a dictionary or a grid")
        dictionary = bl_dictionary(grid)
    difference = dictionary_pairing(nu1, dictionary) - dictionary_pairing(
        nu2, dictionary
    )
    if difference.size == 0:
        return 0.0
    return float(np.max(np.abs(difference)))


def trajectory_norm(
    p: PairedTrajectory, alpha: float, species: int | None = None
) -> float:
    """||f||^2_{[0,T]} of f = first - second, returned squared.

    That is sup_t ||f(t)||_2^2 + int_0^T ||(-Delta)^{alpha/2} f||_2^2 dt with
    the trapezoidal rule over the snapshot times; ``species=None`` sums over
    all species.
    """
    grid = p.grid
    weight = power_symbol(grid, 2.0 * alpha)
    sup_term = 0.0
    seminorm = []
    for f in p.differences():
        values = f.values if species is None else f.component(species)
        sup_term = max(sup_term, spectral_energy(values, grid))
        seminorm.append(spectral_energy(values, grid, weight))
    integral = float(trapezoid(seminorm, p.times)) if len(p.times) > 1 else 0.0
    return sup_term + integral


def _fields_and_times(source: Any) -> tuple[list[Field], list[float]]:
    """Snapshots of a solver Trajectory, a ParticleRun or a (times, fields) pair"""
    if isinstance(source, tuple):
        times, fields = source
        return list(fields), [float(t) for t in times]
    if hasattr(source, "fields"):
        return list(source.fields), [float(t) for t in source.times]
    if hasattr(source, "snapshots"):
        return list(source.snapshots), [float(t) for t in source.times]
    raise AlignmentError(f"Cannot read snapshots from {type(source).__name__}")


def paired_from_trajectories(
    a: Any, b: Any, tolerance: float = 1e-9
) -> PairedTrajectory:
    """Pair two sources whose snapshot times and grids agree"""
    first, times_a = _fields_and_times(a)
    second, times_b = _fields_and_times(b)
    if len(times_a) != len(times_b) or not np.allclose(
        times_a, times_b, rtol=0.0, atol=tolerance
    ):
        raise AlignmentError(
            "Snapshot times differ",
            details={"first": times_a, "second": times_b},
        )
    return PairedTrajectory(tuple(times_a), tuple(first), tuple(second))


@log_operation()
def sup_bl_distance(
    points: Sequence[np.ndarray],
    weight: float,
    densities: Sequence[Field],
    species: int,
    dictionary: BLDictionary,
) -> float:
    """sup over snapshots of bl_metric(empirical measure, gridded density)"""
    if len(points) != len(densities):
        raise AlignmentError("Particle and density snapshots differ in number")
    best = 0.0
    for x, u in zip(points, densities, strict=True):
        empirical = point_measure(x, weight)
        target = grid_measure(u.component(species), u.grid)
        best = max(best, bl_metric(empirical, target, dictionary))
    return best
