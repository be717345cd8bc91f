# xdiff_lab/metrics/__init__.py
from xdiff_lab.metrics.functionals import (
    bl_dictionary,
    bl_metric,
    dictionary_pairing,
    grid_measure,
    paired_from_trajectories,
    point_measure,
    sup_bl_distance,
    trajectory_norm,
)
from xdiff_lab.metrics.models import BLDictionary, Measure, PairedTrajectory

__all__ = [
    "BLDictionary",
    "Measure",
    "PairedTrajectory",
    "bl_dictionary",
    "bl_metric",
    "dictionary_pairing",
    "grid_measure",
    "paired_from_trajectories",
    "point_measure",
    "sup_bl_distance",
    "trajectory_norm",
]
