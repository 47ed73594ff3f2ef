import math

import pytest
from pytest import approx

from lindleywalk.core.common import InsufficientSurvivorsError, StreamPurpose
from lindleywalk.core.harmonic import h2d_estimate
from lindleywalk.core.survival import SurvivalCurve, doney_kappa, geometric_grid, survival_curve
from lindleywalk.core.tail_fit import default_window, fit_prefactor, fit_tail_exponent


def _synthetic_curve(prefactor, exponent, paths=10 ** 9):
    n_grid = geometric_grid(10, 10000, 10)
    return SurvivalCurve.from_estimates(n_grid, [prefactor * n ** -exponent for n in n_grid], paths)


class TestSyntheticFits:
    def test_exact_inverse_law(self):
        fit = fit_tail_exponent(_synthetic_curve(1.0, 1.0))
        assert fit.slope == approx(-1.0, abs=1e-3)
        assert fit.r_squared == approx(1.0, abs=1e-6)
        assert fit.stderr > 0

    def test_exponent_and_prefactor(self):
        curve = _synthetic_curve(2.0, 0.75)
        fit = fit_tail_exponent(curve)
        assert fit.exponent == approx(0.75, abs=1e-3)
        assert fit.prefactor == approx(2.0, rel=1e-2)
        prefactor = fit_prefactor(curve, 0.75)
        assert prefactor.prefactor == approx(2.0, rel=1e-3)

    def test_default_window(self):
        curve = _synthetic_curve(1.0, 1.0)
        assert default_window(curve) == (100, 10000)
        assert fit_tail_exponent(curve).window == (100, 10000)

    def test_explicit_window(self):
        fit = fit_tail_exponent(_synthetic_curve(1.0, 0.5), (10, 1000))
        assert fit.window == (10, 1000)
        assert fit.exponent == approx(0.5, abs=1e-3)

    def test_window_outside_grid(self):
        with pytest.raises(ValueError):
            fit_tail_exponent(_synthetic_curve(1.0, 1.0), (1, 1000))

    def test_too_few_survivors(self):
        curve = _synthetic_curve(1e-3, 1.0, paths=10000)
        with pytest.raises(InsufficientSurvivorsError) as error:
            fit_tail_exponent(curve)
        assert error.value.required_paths > 10000


@pytest.mark.slow
class TestExponentReproduction:
    def test_independent_lattice_walk(self, product_plus_minus_one):
        curve = survival_curve(product_plus_minus_one, (1.0, 1.0), geometric_grid(1, 10000, 10), 10 ** 6, 41)
        fit = fit_tail_exponent(curve, (100, 10000))
        assert 0.9 <= fit.exponent <= 1.1

    def test_negatively_correlated_gaussian_walk(self, gaussian_walk):
        curve = survival_curve(gaussian_walk(-0.5), (1.0, 1.0), geometric_grid(1, 1000, 10), 10 ** 6, 42)
        fit = fit_tail_exponent(curve, (10, 1000))
        assert 1.3 <= fit.exponent <= 1.7

    def test_positively_correlated_gaussian_walk(self, gaussian_walk):
        curve = survival_curve(gaussian_walk(0.5), (1.0, 1.0), geometric_grid(1, 10000, 10), 10 ** 6, 43)
        fit = fit_tail_exponent(curve, (100, 10000))
        assert 0.65 <= fit.exponent <= 0.85

    def test_mixed_drift_walk(self, case_d_walk):
        curve = survival_curve(case_d_walk, (1.0, 1.0), geometric_grid(1, 10000, 10), 10 ** 5, 44)
        fit = fit_tail_exponent(curve, (100, 10000))
        assert 0.4 <= fit.exponent <= 0.6
        prefactor = fit_prefactor(curve, 0.5, (100, 10000))
        h = h2d_estimate(case_d_walk, (1.0, 1.0), 10000, 10 ** 5, 45, purpose=StreamPurpose.HARMONIC_FIRST_STEP)
        predicted = doney_kappa(1.0) * h.value
        assert abs(prefactor.prefactor - predicted) / predicted < 0.15
        assert math.isfinite(prefactor.log_stderr)
