import math

import numpy as np
import pytest

from xdiff_lab.exceptions import AlignmentError, FieldError
from xdiff_lab.frac_ops import Field, PeriodicGrid
from xdiff_lab.metrics import (
    BLDictionary,
    Measure,
    PairedTrajectory,
    bl_dictionary,
    bl_metric,
    dictionary_pairing,
    grid_measure,
    paired_from_trajectories,
    point_measure,
    sup_bl_distance,
    trajectory_norm,
)


@pytest.fixture
def dictionary(grid_2pi):
    return bl_dictionary(grid_2pi, modes=8, tents=64)


class TestMeasure:
    def test_point_measure_defaults_to_probability(self):
        measure = point_measure(np.array([[0.0], [1.0], [2.0], [3.0]]))
        assert measure.mass == pytest.approx(1.0)
        assert measure.d == 1

    def test_signed_total_variation(self):
        measure = Measure(np.array([0.0, 1.0]), np.array([0.5, -0.25]))
        assert measure.mass == pytest.approx(0.25)
        assert measure.total_variation == pytest.approx(0.75)

    def test_rejects_non_finite(self):
        with pytest.raises(FieldError):
            Measure(np.array([0.0, np.inf]), 1.0)

    def test_grid_measure_mass(self, bump_field):
        measure = grid_measure(bump_field.component(0), bump_field.grid)
        assert measure.mass == pytest.approx(2.0 * math.pi)
        with pytest.raises(FieldError):
            grid_measure(np.ones(5), bump_field.grid)


class TestBLDictionary:
    def test_shift_ladder(self):
        shifts = BLDictionary(L=1.0, d=1, centers_per_axis=64).shifts()
        assert shifts[0] == 1
        assert shifts == sorted(set(shifts))
        assert shifts[-1] <= 32

    @pytest.mark.parametrize("d", [1, 2])
    def test_size_matches_pairing(self, d):
        grid = PeriodicGrid(d=d, L=2.0 * math.pi, M=16)
        dictionary = bl_dictionary(grid, modes=3, tents=16)
        measure = point_measure(np.zeros((1, d)))
        assert dictionary_pairing(measure, dictionary).size == dictionary.size

    def test_half_space_wave_vectors(self):
        k = BLDictionary(L=1.0, d=2, modes=2).wave_vectors()
        # (2m+1)^d vectors: the origin plus one of each +-k pair
        assert k.shape == (13, 2)
        assert not any((-row == k).all(axis=1).any() for row in k if row.any())

    def test_dimension_mismatch(self, dictionary):
        with pytest.raises(FieldError):
            dictionary_pairing(point_measure(np.zeros((1, 2))), dictionary)


class TestBLMetric:
    @pytest.mark.parametrize("D", [1.0, 3.0])
    def test_dirac_pair(self, D):
        """BL(delta_0, delta_D) = 2D / (2 + D) on a torus much wider than D"""
        grid = PeriodicGrid(d=1, L=32.0, M=64)
        dictionary = bl_dictionary(grid, modes=32, tents=8192, widths_per_octave=16)
        value = bl_metric(
            point_measure(np.array([[0.0]])), point_measure(np.array([[D]])), dictionary
        )
        exact = 2.0 * D / (2.0 + D)
        assert 0.9 * exact <= value <= exact + 1e-12

    def test_identical_measures(self, dictionary, rng):
        measure = point_measure(rng.uniform(-3.0, 3.0, (50, 1)))
        assert bl_metric(measure, measure, dictionary) == 0.0

    def test_symmetric_and_bounded(self, dictionary, rng):
        nu1 = point_measure(rng.uniform(-3.0, 3.0, (40, 1)))
        nu2 = point_measure(rng.uniform(-1.0, 1.0, (25, 1)), 0.03)
        forward = bl_metric(nu1, nu2, dictionary)
        assert forward == pytest.approx(bl_metric(nu2, nu1, dictionary))
        assert 0.0 < forward <= nu1.total_variation + nu2.total_variation

    def test_single_mode_difference(self, grid_2pi):
        """The sin element alone sees (1/2) * 0.5 * pi of 0.5 sin(x) dx"""
        x = grid_2pi.nodes()
        perturbed = grid_measure(1.0 + 0.5 * np.sin(x), grid_2pi)
        flat = grid_measure(np.ones(grid_2pi.M), grid_2pi)
        value = bl_metric(perturbed, flat, grid=grid_2pi)
        assert value >= 0.25 * math.pi - 1e-9
        assert value <= 2.0 + 1e-12

    def test_needs_dictionary_or_grid(self):
        measure = point_measure(np.zeros((1, 1)))
        with pytest.raises(FieldError):
            bl_metric(measure, measure)

    def test_triangle_inequality(self, dictionary, rng):
        nu1 = point_measure(rng.uniform(-3.0, 3.0, (40, 1)))
        nu2 = point_measure(rng.normal(0.0, 0.5, (30, 1)))
        nu3 = point_measure(rng.uniform(0.0, 2.0, (25, 1)), 0.05)
        direct = bl_metric(nu1, nu3, dictionary)
        assert direct <= (
            bl_metric(nu1, nu2, dictionary) + bl_metric(nu2, nu3, dictionary) + 1e-12
        )

    def test_larger_dictionary_never_lowers_the_value(self, rng):
        """Doubling modes and centres with one width per octave nests the families"""
        nu1 = point_measure(rng.uniform(-3.0, 3.0, (60, 1)))
        nu2 = point_measure(rng.normal(0.5, 0.3, (60, 1)))
        values = [
            bl_metric(
                nu1,
                nu2,
                BLDictionary(
                    L=2.0 * math.pi,
                    d=1,
                    modes=modes,
                    centers_per_axis=centers,
                    widths_per_octave=1,
                ),
            )
            for modes, centers in [(4, 16), (8, 32), (16, 64)]
        ]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:], strict=False))


class TestTrajectoryNorm:
    def test_stationary_difference(self, grid_2pi):
        x = grid_2pi.nodes()
        f = Field(grid_2pi, np.stack([0.2 * np.cos(x), np.zeros_like(x)]))
        zero = Field.zeros(grid_2pi, 2)
        paired = PairedTrajectory((0.0, 0.5, 1.0), (f, f, f), (zero, zero, zero))
        # sup ||f||^2 = 0.04 pi and the seminorm integrand is 0.04 pi on [0, 1]
        assert trajectory_norm(paired, 0.85) == pytest.approx(0.08 * math.pi)
        assert trajectory_norm(paired, 0.85, species=1) == 0.0

    def test_identical_trajectories(self, bump_field):
        paired = PairedTrajectory((0.0, 1.0), (bump_field,) * 2, (bump_field,) * 2)
        assert trajectory_norm(paired, 0.85) == 0.0

    @pytest.mark.parametrize("c", [0.5, 3.0])
    def test_scaling_is_quadratic(self, grid_2pi, rng, c):
        times = (0.0, 0.5, 1.0)
        first = tuple(Field(grid_2pi, rng.normal(size=(2, grid_2pi.M))) for _ in times)
        second = tuple(Field(grid_2pi, rng.normal(size=(2, grid_2pi.M))) for _ in times)
        base = trajectory_norm(PairedTrajectory(times, first, second), 0.85)
        scaled = PairedTrajectory(
            times,
            tuple(Field(grid_2pi, c * u.values) for u in first),
            tuple(Field(grid_2pi, c * v.values) for v in second),
        )
        assert trajectory_norm(scaled, 0.85) == pytest.approx(c**2 * base, rel=1e-12)

    def test_grows_with_the_horizon(self, grid_2pi, rng):
        times = (0.0, 0.25, 0.5, 0.75, 1.0)
        first = tuple(Field(grid_2pi, rng.normal(size=(2, grid_2pi.M))) for _ in times)
        zero = (Field.zeros(grid_2pi, 2),) * len(times)
        norms = [
            trajectory_norm(PairedTrajectory(times[:k], first[:k], zero[:k]), 0.85)
            for k in range(1, len(times) + 1)
        ]
        assert all(b >= a for a, b in zip(norms, norms[1:], strict=False))
        assert norms[-1] > norms[0]


class TestAlignment:
    def test_paired_from_tuples(self, bump_field):
        paired = paired_from_trajectories(
            ([0.0, 0.1], [bump_field, bump_field]),
            ([0.0, 0.1 + 1e-12], [bump_field, bump_field]),
        )
        assert paired.times == (0.0, 0.1)
        assert paired.grid == bump_field.grid

    def test_time_mismatch(self, bump_field):
        with pytest.raises(AlignmentError, match="Snapshot times differ"):
            paired_from_trajectories(
                ([0.0, 0.1], [bump_field] * 2), ([0.0, 0.2], [bump_field] * 2)
            )

    def test_unreadable_source(self):
        with pytest.raises(AlignmentError):
            paired_from_trajectories(object(), object())

    def test_grid_and_length_checks(self, bump_field):
        other = Field.zeros(PeriodicGrid(d=1, L=2.0 * math.pi, M=32), 2)
        with pytest.raises(AlignmentError, match="different grids"):
            PairedTrajectory((0.0,), (bump_field,), (other,))
        with pytest.raises(AlignmentError, match="one field per snapshot"):
            PairedTrajectory((0.0, 1.0), (bump_field,), (bump_field,))
        with pytest.raises(AlignmentError, match="empty"):
            PairedTrajectory((), (), ())
        with pytest.raises(AlignmentError, match="non-decreasing"):
            PairedTrajectory((1.0, 0.0), (bump_field,) * 2, (bump_field,) * 2)


class TestSupBLDistance:
    def test_supremum_over_snapshots(self, bump_field, dictionary, rng):
        near = rng.uniform(-math.pi, math.pi, (400, 1))
        far = np.zeros((400, 1))
        weight = 2.0 * math.pi / 400
        value = sup_bl_distance(
            [near, far], weight, [bump_field, bump_field], 0, dictionary
        )
        per_snapshot = [
            bl_metric(
                point_measure(x, weight),
                grid_measure(bump_field.component(0), bump_field.grid),
                dictionary,
            )
            for x in (near, far)
        ]
        assert value == pytest.approx(max(per_snapshot))
        assert per_snapshot[1] > per_snapshot[0]

    def test_snapshot_count_mismatch(self, bump_field, dictionary):
        with pytest.raises(AlignmentError):
            sup_bl_distance([np.zeros((1, 1))], 1.0, [], 0, dictionary)
