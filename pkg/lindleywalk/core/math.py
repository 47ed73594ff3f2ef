from typing import Tuple

import numpy as np
from scipy.stats import norm

Point = Tuple[float, float]


def sum_points(a: Point, b: Point) -> Point:
    return a[0] + b[0], a[1] + b[1]


def subtract_points(a: Point, b: Point) -> Point:
    return a[0] - b[0], a[1] - b[1]


def clip_to_quadrant(point: Point) -> Point:
    return max(0.0, point[0]), max(0.0, point[1])


def abs_point(point: Point) -> Point:
    return abs(point[0]), abs(point[1])


def is_in_open_quadrant(point: Point) -> bool:
    return point[0] > 0 and point[1] > 0


def is_in_closed_quadrant(point: Point) -> bool:
    return point[0] >= 0 and point[1] >= 0


def as_point(values) -> Point:
    if len(values) != 2:
        raise ValueError("Expected a point with 2 coordinates, got " + str(values))
    return float(values[0]), float(values[1])


def normal_quantile_two_sided(confidence: float) -> float:
    return float(norm.ppf(0.5 + confidence / 2))


# Wilson score interval for binomial proportions, vectorised over arrays of counts
def wilson_interval(successes, trials: int, confidence: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
    successes = np.asarray(successes, dtype=float)
    z = normal_quantile_two_sided(confidence)
    p_hat = successes / trials
    denominator = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denominator
    half_width = z / denominator * np.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4.0 * trials * trials))
    low = np.clip(center - half_width, 0.0, 1.0)
    high = np.clip(center + half_width, 0.0, 1.0)
    # the interval always contains the point estimate, rounding aside
    low = np.minimum(low, p_hat)
    high = np.maximum(high, p_hat)
    return low, high


def relative_deviation(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.abs(a - b) / scale
