import itertools
import math

import numpy as np
import pytest
from pytest import approx

from lindleywalk.core.classification import classify_regime
from lindleywalk.core.common import CaseLabel, NotLatticeError, StateSpaceBudgetError
from lindleywalk.core.distributions import FiniteSupport1D, Gaussian1D, ProductOfMarginals
from lindleywalk.core.harmonic import embed_marginal
from lindleywalk.core.moments import moments
from lindleywalk.core.survival import SurvivalCurve, decay_check, doney_check, doney_kappa, exact_tail_lattice, \
    flat_tail_check, geometric_grid, survival_curve

UP_DRIFT = FiniteSupport1D([(1, 0.75), (-1, 0.25)])
DOWN_DRIFT = FiniteSupport1D([(1, 0.25), (-1, 0.75)])


# P[tau > n] by summing over every sequence of n atoms
def _enumerated_tail(atoms, x, n):
    total = 0.0
    for sequence in itertools.product(atoms, repeat=n):
        position = list(x)
        alive = True
        probability = 1.0
        for value, p in sequence:
            probability *= p
            position = [c + v for c, v in zip(position, value)]
            if min(position) <= 0:
                alive = False
                break
        if alive:
            total += probability
    return total


def _four_sigma(p, paths):
    return 4 * math.sqrt(p * (1 - p) / paths) + 1.0 / paths


class TestExactTails:
    def test_plus_minus_one_small_n(self, plus_minus_one):
        tails = exact_tail_lattice(plus_minus_one, 1, 4)
        assert tails == [1.0, 0.5, 0.5, 0.375, 0.375]

    def test_plus_minus_one_matches_enumeration(self, plus_minus_one):
        atoms = [((int(v),), p) for v, p in plus_minus_one.atoms()]
        tails = exact_tail_lattice(plus_minus_one, 1, 12)
        for n in range(13):
            assert tails[n] == approx(_enumerated_tail(atoms, (1,), n), abs=1e-15)

    def test_ballot_formula(self, plus_minus_one):
        tails = exact_tail_lattice(plus_minus_one, 1, 40)
        for m in range(1, 21):
            assert tails[2 * m] == approx(math.comb(2 * m, m) / 4 ** m, rel=1e-12)

    def test_two_dimensional_law_matches_enumeration(self, correlated_lattice_walk):
        atoms = [(tuple(int(c) for c in v), p) for v, p in correlated_lattice_walk.atoms()]
        tails = exact_tail_lattice(correlated_lattice_walk, (2, 1), 6)
        for n in range(7):
            assert tails[n] == approx(_enumerated_tail(atoms, (2, 1), n), abs=1e-14)

    def test_independent_product_is_the_square(self, plus_minus_one, product_plus_minus_one):
        one = exact_tail_lattice(plus_minus_one, 1, 20)
        two = exact_tail_lattice(product_plus_minus_one, (1, 1), 20)
        assert two[2] == approx(0.25)
        assert two == approx([p * p for p in one], abs=1e-15)

    def test_continuous_law_is_rejected(self):
        with pytest.raises(NotLatticeError):
            exact_tail_lattice(Gaussian1D(0, 1), 1, 10)

    def test_cell_budget(self, product_plus_minus_one):
        with pytest.raises(StateSpaceBudgetError):
            exact_tail_lattice(product_plus_minus_one, (1, 1), 10 ** 4, cell_budget=10 ** 6)


class TestSurvivalCurve:
    def test_one_dimensional_embedding_at_four_steps(self, plus_minus_one):
        curve = survival_curve(embed_marginal(plus_minus_one), (1.0, 1.0), [1, 2, 3, 4], 20000, 31)
        assert abs(curve.estimates[3] - 0.375) < _four_sigma(0.375, 20000)

    def test_monte_carlo_agrees_with_exact_tail(self, product_plus_minus_one):
        n_grid = [1, 2, 5, 10, 20, 50]
        curve = survival_curve(product_plus_minus_one, (1.0, 1.0), n_grid, 20000, 32, block_size=4096)
        exact = exact_tail_lattice(product_plus_minus_one, (1, 1), 50)
        for n, estimate in zip(n_grid, curve.estimates):
            assert abs(estimate - exact[n]) < _four_sigma(exact[n], 20000)

    def test_estimates_are_non_increasing(self, correlated_lattice_walk):
        curve = survival_curve(correlated_lattice_walk, (2.0, 1.0), list(range(0, 101, 5)), 5000, 33)
        assert curve.estimates[0] == 1.0
        assert all(np.diff(curve.survivors) <= 0)
        assert all(curve.ci_low <= curve.estimates) and all(curve.estimates <= curve.ci_high)

    @pytest.mark.parametrize("workers", [1, 4, 16])
    def test_result_does_not_depend_on_workers(self, correlated_lattice_walk, workers):
        n_grid = [1, 10, 100]
        reference = survival_curve(correlated_lattice_walk, (2.0, 1.0), n_grid, 4000, 34, block_size=250)
        curve = survival_curve(correlated_lattice_walk, (2.0, 1.0), n_grid, 4000, 34, block_size=250,
                               workers=workers)
        assert np.array_equal(curve.survivors, reference.survivors)

    def test_same_seed_gives_the_same_curve(self, correlated_lattice_walk):
        first = survival_curve(correlated_lattice_walk, (2.0, 1.0), [10, 50], 4000, 35)
        second = survival_curve(correlated_lattice_walk, (2.0, 1.0), [10, 50], 4000, 35)
        assert np.array_equal(first.survivors, second.survivors)

    def test_too_few_paths(self, product_plus_minus_one):
        with pytest.raises(ValueError):
            survival_curve(product_plus_minus_one, (1.0, 1.0), [1, 2], 10, 1)

    def test_grid_must_increase(self, product_plus_minus_one):
        with pytest.raises(ValueError):
            survival_curve(product_plus_minus_one, (1.0, 1.0), [5, 2], 1000, 1)

    def test_censor_horizon_below_grid(self, product_plus_minus_one):
        with pytest.raises(ValueError):
            survival_curve(product_plus_minus_one, (1.0, 1.0), [5, 20], 1000, 1, censor_horizon=10)


def test_geometric_grid():
    grid = geometric_grid(1, 1000, 10)
    assert grid[0] == 1 and grid[-1] == 1000
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert 100 in grid


class TestShapeChecks:
    def test_exponential_decay_passes(self):
        n_grid = list(range(10, 201, 10))
        curve = SurvivalCurve.from_estimates(n_grid, [math.exp(-n / 2) for n in n_grid], 10 ** 9)
        assert decay_check(curve, 2.0, (10, 200)).passed

    def test_slow_decay_fails(self):
        n_grid = list(range(10, 201, 10))
        curve = SurvivalCurve.from_estimates(n_grid, [n ** -0.5 for n in n_grid], 10 ** 6)
        assert not decay_check(curve, 2.0, (10, 200)).passed

    def test_flat_tail(self):
        curve = SurvivalCurve.from_estimates([100, 1000], [0.44, 0.44], 20000)
        assert flat_tail_check(curve, 100, 1000).passed
        falling = SurvivalCurve.from_estimates([100, 1000], [0.44, 0.30], 20000)
        assert not flat_tail_check(falling, 100, 1000).passed

    def test_negative_drift_walk_decays_fast(self, plus_minus_one):
        dist = ProductOfMarginals(DOWN_DRIFT, plus_minus_one)
        assert classify_regime(moments(dist)).case_label == CaseLabel.A_NEGATIVE_DRIFT
        curve = survival_curve(dist, (1.0, 1.0), list(range(10, 201, 10)), 40000, 36)
        assert curve.survivors[0] > 100
        assert decay_check(curve, 2.0, (10, 200)).passed

    def test_positive_drift_walk_has_a_flat_tail(self):
        dist = ProductOfMarginals(UP_DRIFT, UP_DRIFT)
        assert classify_regime(moments(dist)).case_label == CaseLabel.B_POSITIVE_DRIFT
        curve = survival_curve(dist, (1.0, 1.0), [10, 100, 1000], 20000, 37)
        check = flat_tail_check(curve, 100, 1000)
        assert check.passed
        # both coordinates survive with probability 1 - 1/3 from 1
        assert abs(check.end - 4 / 9) < _four_sigma(4 / 9, 20000)


class TestDoney:
    def test_kappa(self):
        assert doney_kappa(1.0) == approx(math.sqrt(2 / math.pi))
        assert doney_kappa(1.0) == approx(0.79788, abs=1e-5)

    def test_plus_minus_one_ratio(self, plus_minus_one):
        table = doney_check(plus_minus_one, 1.0, [100, 1000, 10000])
        assert table.method == "exact_lattice"
        assert table.h1 == approx(1.0, abs=1e-9)
        assert table.kappa * table.h1 == approx(math.sqrt(2 / math.pi), rel=1e-9)
        assert abs(table.rows[-1].ratio - 1) < 0.01
        assert table.monotone_approach
        # sqrt(n) C(n, n/2) / 2^n against sqrt(2 / pi) is about 1 - 1 / (4n)
        assert table.rows[0].ratio == approx(1 - 1 / 400, abs=1e-4)
