import math

import numpy as np
import pytest

from lindleywalk.core.occupation import occupation_series


def test_box_visits_match_survival(product_plus_minus_one):
    series = occupation_series(product_plus_minus_one, (1.0, 1.0), 50, 4000, 71)
    assert series.disagreements() == []
    assert series.box_terms[0] == 1.0
    assert series.survival_terms[0] == 1.0


def test_unit_box_on_the_lattice_is_the_origin(product_plus_minus_one):
    series = occupation_series(product_plus_minus_one, (1.0, 1.0), 30, 2000, 72)
    assert np.array_equal(series.origin_terms, series.box_terms)
    assert series.origin_partial_sums[-1] == series.box_partial_sums[-1]


def test_rows_and_partial_sums(correlated_lattice_walk):
    series = occupation_series(correlated_lattice_walk, (2.0, 3.0), 20, 1000, 73)
    rows = series.rows()
    assert len(rows) == 21
    assert rows[0][0] == 0
    assert all(np.diff(series.box_partial_sums) >= 0)
    assert math.isnan(series.decade_growth())


def test_box_must_be_positive(product_plus_minus_one):
    with pytest.raises(ValueError):
        occupation_series(product_plus_minus_one, (0.0, 1.0), 10, 1000, 1)


@pytest.mark.slow
def test_negative_correlation_gives_a_converging_series(gaussian_walk):
    series = occupation_series(gaussian_walk(-0.5), (1.0, 1.0), 2000, 20000, 74)
    # mean term over the last decade of n
    late_terms = (series.box_partial_sums[2000] - series.box_partial_sums[200]) / 1800
    assert late_terms < 1e-4
    assert series.decade_growth() < 0.5


@pytest.mark.slow
def test_zero_correlation_grows_like_log_n(gaussian_walk):
    series = occupation_series(gaussian_walk(0.0), (1.0, 1.0), 2000, 20000, 75)
    assert 0.75 <= series.decade_growth() <= 1.25
    assert series.box_partial_sums[2000] > series.box_partial_sums[200] > series.box_partial_sums[20]
