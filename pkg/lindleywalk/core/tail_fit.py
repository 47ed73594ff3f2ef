import math
from typing import Optional, Tuple

import numpy as np

from lindleywalk.core.common import InsufficientSurvivorsError
from lindleywalk.core.math import normal_quantile_two_sided
from lindleywalk.core.survival import SurvivalCurve

MIN_SURVIVORS = 30
MIN_FIT_POINTS = 3
CI_CONFIDENCE = 0.95


class ExponentFit:
    def __init__(self, slope: float, intercept: float, stderr: float, window: Tuple[int, int], r_squared: float,
                 points: int):
        self.slope = slope
        self.intercept = intercept
        self.stderr = stderr
        self.window = window
        self.r_squared = r_squared
        self.points = points

    # Tail exponent, positive for decaying curves
    @property
    def exponent(self) -> float:
        return -self.slope

    @property
    def prefactor(self) -> float:
        return math.exp(self.intercept)

    def to_json(self):
        return {
            "slope": self.slope,
            "exponent": self.exponent,
            "intercept": self.intercept,
            "prefactor": self.prefactor,
            "stderr": self.stderr,
            "window": list(self.window),
            "r_squared": self.r_squared,
            "points": self.points
        }


class PrefactorFit:
    def __init__(self, prefactor: float, log_stderr: float, exponent: float, window: Tuple[int, int]):
        self.prefactor = prefactor
        self.log_stderr = log_stderr
        self.exponent = exponent
        self.window = window

    def to_json(self):
        return {"prefactor": self.prefactor, "log_stderr": self.log_stderr, "exponent": self.exponent,
                "window": list(self.window)}


def default_window(curve: SurvivalCurve) -> Tuple[int, int]:
    n_max = curve.n_grid[-1]
    return max(1, n_max // 100), n_max


# Grid points of the window with enough survivors, as (log n, log P, sigma of log P)
def _window_points(curve: SurvivalCurve, window: Optional[Tuple[int, int]]):
    if window is None:
        window = default_window(curve)
    n_min, n_max = window
    if n_min < curve.n_grid[0] or n_max > curve.n_grid[-1] or n_min >= n_max:
        raise ValueError("fit window " + str(window) + " is not inside the curve's grid")
    z = normal_quantile_two_sided(CI_CONFIDENCE)
    points = []
    smallest_positive = None
    for n, survivors, estimate, low, high in zip(curve.n_grid, curve.survivors, curve.estimates, curve.ci_low,
                                                 curve.ci_high):
        if not n_min <= n <= n_max or n == 0:
            continue
        if estimate > 0:
            smallest_positive = estimate
        if survivors < MIN_SURVIVORS or low <= 0:
            continue
        sigma = (math.log(high) - math.log(low)) / (2 * z)
        points.append((math.log(n), math.log(estimate), sigma))
    if len(points) < MIN_FIT_POINTS:
        floor = smallest_positive if smallest_positive else 1.0 / curve.paths
        required = int(math.ceil(MIN_SURVIVORS / floor))
        raise InsufficientSurvivorsError("only " + str(len(points)) + " grid points in window " + str(window)
                                         + " have " + str(MIN_SURVIVORS) + " or more survivors", required)
    return window, np.array(points)


def fit_tail_exponent(curve: SurvivalCurve, window: Optional[Tuple[int, int]] = None) -> ExponentFit:
    """Weighted least squares of log P on log n; weights are inverse variances read off the Wilson intervals."""
    window, points = _window_points(curve, window)
    log_n, log_p, sigma = points[:, 0], points[:, 1], points[:, 2]
    (slope, intercept), covariance = np.polyfit(log_n, log_p, 1, w=1 / sigma, cov='unscaled')
    weights = 1 / sigma ** 2
    mean = np.sum(weights * log_p) / np.sum(weights)
    residual = np.sum(weights * (log_p - (slope * log_n + intercept)) ** 2)
    total = np.sum(weights * (log_p - mean) ** 2)
    r_squared = 1 - residual / total if total > 0 else 1.0
    return ExponentFit(float(slope), float(intercept), float(math.sqrt(covariance[0, 0])), window, float(r_squared),
                       len(points))


# log c as the weighted mean of log(P n^exponent) over the window
def fit_prefactor(curve: SurvivalCurve, exponent: float, window: Optional[Tuple[int, int]] = None) -> PrefactorFit:
    window, points = _window_points(curve, window)
    log_n, log_p, sigma = points[:, 0], points[:, 1], points[:, 2]
    weights = 1 / sigma ** 2
    log_prefactor = np.sum(weights * (log_p + exponent * log_n)) / np.sum(weights)
    return PrefactorFit(float(math.exp(log_prefactor)), float(math.sqrt(1 / np.sum(weights))), exponent, window)
