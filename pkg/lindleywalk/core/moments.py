import math
from typing import List, Optional, Tuple

import numpy as np

from lindleywalk.core.common import CENTERED_TOLERANCE, Exactness
from lindleywalk.core.distributions import IncrementDistribution


class MomentReport:
    """Exact moment data of an increment law, as consumed by the regime classification.

    Moment finiteness is stored as thresholds t: E|Xᵢ|^r < inf exactly when r < t.
    """

    def __init__(self, mean: Tuple[float, float], covariance: np.ndarray, rho: Optional[float],
                 rho_reason: Optional[str], positive_part_mean: Tuple[float, float],
                 negative_part_mean: Tuple[float, float], neg_part_second_moment: Tuple[float, float],
                 absolute_thresholds: Tuple[float, float], negative_thresholds: Tuple[float, float],
                 positive_thresholds: Tuple[float, float], exactness: Exactness, error_bound: float):
        self.mean = mean
        self.covariance = covariance
        self.rho = rho
        self.rho_reason = rho_reason
        self.positive_part_mean = positive_part_mean
        self.negative_part_mean = negative_part_mean
        self.neg_part_second_moment = neg_part_second_moment
        self.absolute_thresholds = absolute_thresholds
        self.negative_thresholds = negative_thresholds
        self.positive_thresholds = positive_thresholds
        self.exactness = exactness
        self.error_bound = error_bound

    def moment_order(self, i: int, r: float) -> bool:
        return r < self.absolute_thresholds[i]

    def neg_moment_order(self, i: int, r: float) -> bool:
        return r < self.negative_thresholds[i]

    def pos_moment_order(self, i: int, r: float) -> bool:
        return r < self.positive_thresholds[i]

    def variances(self) -> Tuple[float, float]:
        return float(self.covariance[0, 0]), float(self.covariance[1, 1])

    def is_centered(self, i: int) -> bool:
        return abs(self.mean[i]) < CENTERED_TOLERANCE

    def assumed_centered(self, i: int) -> bool:
        return self.is_centered(i) and self.mean[i] != 0

    def swapped(self) -> 'MomentReport':
        return MomentReport(
            mean=self.mean[::-1],
            covariance=self.covariance[::-1, ::-1],
            rho=self.rho,
            rho_reason=self.rho_reason,
            positive_part_mean=self.positive_part_mean[::-1],
            negative_part_mean=self.negative_part_mean[::-1],
            neg_part_second_moment=self.neg_part_second_moment[::-1],
            absolute_thresholds=self.absolute_thresholds[::-1],
            negative_thresholds=self.negative_thresholds[::-1],
            positive_thresholds=self.positive_thresholds[::-1],
            exactness=self.exactness,
            error_bound=self.error_bound)

    def to_json(self):
        return {
            "mean": list(self.mean),
            "covariance": self.covariance.tolist(),
            "rho": self.rho,
            "rho_reason": self.rho_reason,
            "positive_part_mean": list(self.positive_part_mean),
            "negative_part_mean": list(self.negative_part_mean),
            "neg_part_second_moment": list(self.neg_part_second_moment),
            "absolute_moment_thresholds": [_json_number(t) for t in self.absolute_thresholds],
            "negative_moment_thresholds": [_json_number(t) for t in self.negative_thresholds],
            "positive_moment_thresholds": [_json_number(t) for t in self.positive_thresholds],
            "assumed_centered": [self.assumed_centered(0), self.assumed_centered(1)],
            "exactness": self.exactness.name,
            "error_bound": self.error_bound
        }


# JSON has no infinity; finite-for-all-orders is written as null
def _json_number(value: float):
    return None if math.isinf(value) else value


def _correlation(covariance: np.ndarray) -> Tuple[Optional[float], Optional[str]]:
    variances = np.diag(covariance)
    if not np.all(np.isfinite(covariance)):
        return None, "infinite variance"
    if variances[0] <= 0 or variances[1] <= 0:
        return None, "degenerate marginal (a coordinate is almost surely constant)"
    rho = covariance[0, 1] / math.sqrt(variances[0] * variances[1])
    return float(min(1.0, max(-1.0, rho))), None


def moments(dist: IncrementDistribution) -> MomentReport:
    marginals = [dist.marginal(0), dist.marginal(1)]
    exactness = Exactness.EXACT
    error_bound = 0.0
    for marginal in marginals:
        marginal_exactness, marginal_error = marginal.exactness()
        if marginal_exactness == Exactness.NUMERICAL:
            exactness = Exactness.NUMERICAL
            error_bound = max(error_bound, marginal_error)
    covariance = dist.covariance()
    rho, rho_reason = _correlation(covariance)
    return MomentReport(
        mean=(marginals[0].mean(), marginals[1].mean()),
        covariance=covariance,
        rho=rho,
        rho_reason=rho_reason,
        positive_part_mean=(marginals[0].positive_part_mean(), marginals[1].positive_part_mean()),
        negative_part_mean=(marginals[0].negative_part_mean(), marginals[1].negative_part_mean()),
        neg_part_second_moment=(marginals[0].negative_part_moment(2), marginals[1].negative_part_moment(2)),
        absolute_thresholds=(marginals[0].absolute_moment_threshold(), marginals[1].absolute_moment_threshold()),
        negative_thresholds=(marginals[0].negative_moment_threshold(), marginals[1].negative_moment_threshold()),
        positive_thresholds=(marginals[0].positive_moment_threshold(), marginals[1].positive_moment_threshold()),
        exactness=exactness,
        error_bound=error_bound)


class AssumptionReport:
    def __init__(self, not_on_line: bool, quadrant_probability: float):
        self.not_on_line = not_on_line
        self.quadrant_probability = quadrant_probability

    @property
    def hits_open_quadrant(self) -> bool:
        return self.quadrant_probability > 0

    @property
    def passed(self) -> bool:
        return self.not_on_line and self.hits_open_quadrant

    def failures(self) -> List[str]:
        failures = []
        if not self.not_on_line:
            failures.append("support contained in an affine line")
        if not self.hits_open_quadrant:
            failures.append("P[X in open quadrant] = 0")
        return failures

    def to_json(self):
        return {
            "not_on_line": self.not_on_line,
            "quadrant_probability": self.quadrant_probability,
            "passed": self.passed
        }


def check_assumptions(dist: IncrementDistribution) -> AssumptionReport:
    return AssumptionReport(not dist.support_on_line(), dist.quadrant_probability())
