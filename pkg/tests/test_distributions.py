import math

import numpy as np
import pytest
from pytest import approx

from lindleywalk.core.common import Exactness, InvalidDistributionError
from lindleywalk.core.distributions import BivariateGaussian, FiniteSupport1D, FiniteSupport2D, Gaussian1D, \
    PowerNegativeTail, ProductOfMarginals
from lindleywalk.core.random_streams import single_stream


class TestFiniteSupport1D:
    def test_plus_minus_one_moments(self, plus_minus_one):
        assert plus_minus_one.mean() == 0
        assert plus_minus_one.variance() == 1
        assert plus_minus_one.negative_part_mean() == 0.5
        assert plus_minus_one.negative_part_moment(2) == 0.5
        assert plus_minus_one.support_bounds() == (-1.0, 1.0)
        assert plus_minus_one.is_integer_lattice()

    def test_plus_one_minus_two_is_centered(self, plus_one_minus_two):
        assert plus_one_minus_two.mean() == approx(0, abs=1e-15)
        assert plus_one_minus_two.negative_part_moment(2) == approx(4 / 3)

    def test_cdf_and_excess_moments(self, plus_one_minus_two):
        assert plus_one_minus_two.cdf(-2) == approx(1 / 3)
        assert plus_one_minus_two.cdf(-2.5) == 0
        assert plus_one_minus_two.negative_excess_moment(1, 1.0) == approx(1 / 3)
        assert plus_one_minus_two.positive_excess_mean(0.5) == approx(1 / 3)

    def test_killed_expectation_drops_exited_mass(self, plus_minus_one):
        assert plus_minus_one.killed_expectation(lambda y: y, 1.0) == approx(1.0)
        assert plus_minus_one.killed_expectation(lambda y: 1.0, 1.0) == approx(0.5)

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(InvalidDistributionError):
            FiniteSupport1D([(1, 0.5), (-1, 0.4)])

    def test_probabilities_must_be_positive(self):
        with pytest.raises(InvalidDistributionError):
            FiniteSupport1D([(1, 1.0), (-1, 0.0)])

    def test_sample_mean(self, plus_one_minus_two):
        draws = plus_one_minus_two.sample(single_stream(3), 10 ** 6)
        assert set(np.unique(draws)) == {-2.0, 1.0}
        # 5 standard errors of a variance-2 law
        assert abs(draws.mean()) < 5 * math.sqrt(2 / 10 ** 6)


class TestGaussian1D:
    def test_standard_normal_negative_part(self):
        marginal = Gaussian1D(0, 1)
        assert marginal.negative_part_mean() == approx(1 / math.sqrt(2 * math.pi))
        assert marginal.negative_part_moment(2) == approx(0.5)
        assert marginal.negative_part_moment(3) == approx(2 / math.sqrt(2 * math.pi))

    def test_negative_cubic_increment_is_bounded_by_third_moment(self):
        marginal = Gaussian1D(0, 1)
        assert marginal.negative_cubic_increment(0.0) == 0
        assert marginal.negative_cubic_increment(50.0) == approx(marginal.negative_part_moment(3))

    def test_variance_must_be_positive(self):
        with pytest.raises(InvalidDistributionError):
            Gaussian1D(0, 0)

    def test_sample_mean(self):
        draws = Gaussian1D(0, 1).sample(single_stream(5), 10 ** 6)
        assert abs(draws.mean()) < 4e-3


class TestPowerNegativeTail:
    def test_shift_sets_the_mean(self):
        marginal = PowerNegativeTail(4.5, 0.0)
        assert marginal.mean() == approx(0, abs=1e-12)
        assert math.isfinite(marginal.variance())
        assert marginal.exactness()[0] == Exactness.NUMERICAL

    def test_heavy_tail_has_infinite_variance(self):
        marginal = PowerNegativeTail(2.5, 0.0)
        assert math.isinf(marginal.variance())
        assert marginal.absolute_moment_threshold() == 1.5

    def test_cdf_at_the_first_atom(self):
        marginal = PowerNegativeTail(3.5, 0.0, negative_mass=0.4)
        assert marginal.cdf(-1) == approx(0.4)
        assert marginal.cdf(-0.5) == approx(0.4)
        assert marginal.cdf(marginal.positive_atom) == 1.0

    def test_exponent_must_exceed_one(self):
        with pytest.raises(InvalidDistributionError):
            PowerNegativeTail(1.0, 0.0)


class TestFiniteSupport2D:
    def test_marginals_and_covariance(self):
        dist = FiniteSupport2D([((1, 1), 0.25), ((-1, -1), 0.25), ((1, -1), 0.25), ((-1, 1), 0.25)])
        assert dist.marginal(0).atoms() == [(-1.0, 0.5), (1.0, 0.5)]
        assert np.allclose(dist.covariance(), np.eye(2))
        assert dist.quadrant_probability() == 0.25
        assert not dist.support_on_line()

    def test_support_on_a_line(self):
        dist = FiniteSupport2D([((1, 1), 0.5), ((-1, -1), 0.5)])
        assert dist.support_on_line()

    def test_swapped(self, correlated_lattice_walk):
        swapped = correlated_lattice_walk.swapped()
        assert swapped.marginal(0).atoms() == correlated_lattice_walk.marginal(1).atoms()
        assert swapped.covariance()[0, 0] == approx(correlated_lattice_walk.covariance()[1, 1])


class TestBivariateGaussian:
    def test_quadrant_probability_of_correlated_law(self):
        # 1/4 + arcsin(rho) / (2 pi)
        dist = BivariateGaussian((0, 0), [[1, 0.5], [0.5, 1]])
        assert dist.quadrant_probability() == approx(1 / 3, abs=1e-6)

    def test_quadrant_probability_of_independent_law(self):
        assert BivariateGaussian((0, 0), [[2, 0], [0, 3]]).quadrant_probability() == approx(0.25)

    def test_rank_one_law_lies_on_a_line(self):
        dist = BivariateGaussian((0, 0), [[1, 1], [1, 1]])
        assert dist.support_on_line()
        assert dist.quadrant_probability() == approx(0.5)

    def test_covariance_must_be_positive_semi_definite(self):
        with pytest.raises(InvalidDistributionError):
            BivariateGaussian((0, 0), [[1, 2], [2, 1]])

    def test_degenerate_coordinate_becomes_a_point_mass(self):
        dist = BivariateGaussian((0.5, 0), [[0, 0], [0, 1]])
        assert dist.marginal(0).is_point_mass()
        assert dist.quadrant_probability() == approx(0.5)


class TestProductOfMarginals:
    def test_atoms_are_products(self, product_plus_minus_one):
        atoms = product_plus_minus_one.atoms()
        assert len(atoms) == 4
        assert all(p == 0.25 for _, p in atoms)
        assert product_plus_minus_one.quadrant_probability() == 0.25

    def test_sample_points_shape(self, product_plus_minus_one):
        points = product_plus_minus_one.sample_points(single_stream(1), 100)
        assert points.shape == (100, 2)

    def test_point_mass_coordinate_lies_on_a_line(self, plus_minus_one):
        assert ProductOfMarginals(plus_minus_one, FiniteSupport1D([(1, 1.0)])).support_on_line()
