import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lindleywalk.core.common import ExitCoordinate
from lindleywalk.core.distributions import FiniteSupport1D, ProductOfMarginals
from lindleywalk.core.math import relative_deviation
from lindleywalk.core.path_batches import delta_from_support, reflection_comparison
from lindleywalk.core.random_streams import single_stream
from lindleywalk.core.walk import Censored, contraction_check, coordinate_exit_time, dual_waiting_time, \
    dual_waiting_times_batch, exit_time, exit_time_from_increments, lindley_path, lindley_path_from_increments, \
    lindley_paths_batch, lindley_step, reflected_path_from_increments, reflected_step, write_trajectory_csv

lattice_steps = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), max_size=60)


class TestSteps:
    def test_lindley_step(self):
        assert lindley_step((1.0, 1.0), (2.0, -1.0)) == (0.0, 2.0)

    def test_reflected_step(self):
        assert reflected_step((1.0, 1.0), (2.0, -1.0)) == (1.0, 2.0)

    def test_states_must_lie_in_the_quadrant(self):
        with pytest.raises(ValueError):
            lindley_step((-1.0, 0.0), (0.0, 0.0))
        with pytest.raises(ValueError):
            reflected_step((0.0, -0.5), (0.0, 0.0))

    def test_lindley_path_length(self, correlated_lattice_walk):
        path = lindley_path(correlated_lattice_walk, (0.0, 0.0), 25, single_stream(4))
        assert len(path) == 26
        assert all(w[0] >= 0 and w[1] >= 0 for w in path)


class TestDuality:
    @given(lattice_steps)
    def test_unrolled_form_equals_recursion(self, increments):
        assert dual_waiting_time(increments) == lindley_path_from_increments((0.0, 0.0), increments)[-1]

    def test_lattice_batches_agree_exactly(self):
        gen = single_stream(7)
        increments = gen.integers(-3, 4, size=(10 ** 4, 200, 2)).astype(float)
        assert np.array_equal(lindley_paths_batch(increments, np.zeros(2)), dual_waiting_times_batch(increments))

    def test_gaussian_batches_agree(self, gaussian_walk):
        gen = single_stream(8)
        increments = gaussian_walk(0.3).sample_points(gen, 10 ** 4 * 200).reshape(10 ** 4, 200, 2)
        deviation = relative_deviation(lindley_paths_batch(increments, np.zeros(2)),
                                       dual_waiting_times_batch(increments))
        assert deviation.max() <= 1e-9

    def test_batch_matches_single_paths(self, correlated_lattice_walk):
        gen = single_stream(9)
        for length in [0, 1, 17, 200]:
            increments = correlated_lattice_walk.sample_points(gen, length)
            single = lindley_path_from_increments((0.0, 0.0), increments)
            batch = dual_waiting_times_batch(increments.reshape(1, length, 2))[0]
            assert [tuple(w) for w in batch] == single

    @given(lattice_steps, st.tuples(st.integers(0, 10), st.integers(0, 10)),
           st.tuples(st.integers(0, 10), st.integers(0, 10)))
    def test_lindley_map_is_a_contraction(self, increments, x, y):
        from_x = lindley_path_from_increments(x, increments)
        from_y = lindley_path_from_increments(y, increments)
        distances = [max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(from_x, from_y)]
        assert all(later <= earlier for earlier, later in zip(distances, distances[1:]))

    def test_contraction_check_on_gaussian_walk(self, gaussian_walk):
        report = contraction_check(gaussian_walk(-0.4), (3.0, 0.5), (0.0, 7.0), 500, single_stream(10))
        assert report.non_increasing


class TestReflection:
    @given(st.lists(st.tuples(st.integers(-8, 3), st.integers(-8, 3)), max_size=60))
    def test_reflected_walk_stays_within_delta_of_lindley(self, increments):
        reflected = reflected_path_from_increments((0.0, 0.0), increments)
        lindley = lindley_path_from_increments((0.0, 0.0), increments)
        for r, w in zip(reflected, lindley):
            assert r[0] <= w[0] + 3 and r[1] <= w[1] + 3

    def test_delta_from_support(self, correlated_lattice_walk):
        assert delta_from_support(correlated_lattice_walk) == 2.0

    def test_bounded_law_has_no_violations(self, correlated_lattice_walk):
        report = reflection_comparison(correlated_lattice_walk, None, 2000, 200, 12, block_size=500)
        assert report.delta == 2.0
        assert report.comparison_guaranteed
        assert report.violations == []
        assert report.max_excess <= 0

    def test_gaussian_law_breaks_a_small_delta(self, gaussian_walk):
        report = reflection_comparison(gaussian_walk(0.0), 0.5, 100, 50, 13)
        assert not report.comparison_guaranteed
        assert report.violations
        assert len(report.violations) <= 2 * 100
        first = report.violations[0]
        assert first.reflected > first.lindley + 0.5

    def test_unbounded_law_needs_a_delta(self, gaussian_walk):
        with pytest.raises(ValueError):
            delta_from_support(gaussian_walk(0.0))


class TestExitTimes:
    def test_exit_through_first_coordinate(self):
        result = exit_time_from_increments((1.0, 1.0), [(1, 0), (-3, 0)])
        assert result.tau == 2
        assert result.exit_coordinate == ExitCoordinate.FIRST
        assert result.overshoot1 == -1.0

    def test_exit_through_both_coordinates(self):
        result = exit_time_from_increments((1.0, 1.0), [(-1, -1)])
        assert result.tau == 1
        assert result.exit_coordinate == ExitCoordinate.BOTH
        assert result.overshoot1 == 0.0

    def test_censored_path(self):
        result = exit_time_from_increments((1.0, 1.0), [(1, 1)] * 3)
        assert result.is_censored
        assert result.tau == Censored(3)
        assert result.exit_coordinate == ExitCoordinate.NONE

    def test_coordinate_exit_time(self):
        assert coordinate_exit_time(1.0, [1, -1, -1]) == 3
        assert coordinate_exit_time(1.0, [1, 1]) is None

    def test_exit_time_walks_past_one_chunk(self):
        # the first coordinate can never exit, the second drifts down slowly
        walk = ProductOfMarginals(FiniteSupport1D([(1, 1.0)]), FiniteSupport1D([(1, 0.4), (-1, 0.6)]))
        result = exit_time(walk, (1.0, 3000.0), 10 ** 6, single_stream(14))
        assert not result.is_censored
        assert result.tau >= 3000
        assert result.exit_coordinate == ExitCoordinate.SECOND

    def test_start_must_lie_in_the_open_quadrant(self, product_plus_minus_one):
        with pytest.raises(ValueError):
            exit_time(product_plus_minus_one, (0.0, 1.0), 10, single_stream(1))


def test_write_trajectory_csv(tmp_path, correlated_lattice_walk):
    file_path = str(tmp_path / "trajectory.csv")
    increments = correlated_lattice_walk.sample_points(single_stream(15), 30)
    write_trajectory_csv(file_path, increments, (0.0, 0.0), (0.0, 0.0))
    with open(file_path) as file:
        rows = list(csv.reader(file))
    assert rows[0] == ["n", "S1", "S2", "W1", "W2", "R1", "R2"]
    assert len(rows) == 32
    lindley = lindley_path_from_increments((0.0, 0.0), increments)
    assert (float(rows[-1][3]), float(rows[-1][4])) == lindley[-1]
