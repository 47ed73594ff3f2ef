import math

import numpy as np

from lindleywalk.core.common import DegenerateDistributionError


class DecorrelationResult:
    """Lower-triangular M with M Cov Mᵀ = I. M maps the quadrant onto a cone of angle arccos(-rho)."""

    def __init__(self, matrix: np.ndarray, cone_angle: float):
        self.matrix = matrix
        self.cone_angle = cone_angle
        self.p = 2 * cone_angle / math.pi

    def transformed_covariance(self, covariance: np.ndarray) -> np.ndarray:
        return self.matrix @ covariance @ self.matrix.T

    def image_cone_cosine(self) -> float:
        e1 = self.matrix[:, 0]
        e2 = self.matrix[:, 1]
        return float(e1 @ e2 / (np.linalg.norm(e1) * np.linalg.norm(e2)))

    def to_json(self):
        return {"matrix": self.matrix.tolist(), "cone_angle": self.cone_angle, "p": self.p}


def decorrelate(covariance) -> DecorrelationResult:
    covariance = np.asarray(covariance, dtype=float)
    sigma1_squared, sigma2_squared = covariance[0, 0], covariance[1, 1]
    if not (sigma1_squared > 0 and sigma2_squared > 0):
        raise DegenerateDistributionError("decorrelation needs positive variances, got "
                                          + str([sigma1_squared, sigma2_squared]))
    sigma1 = math.sqrt(sigma1_squared)
    sigma2 = math.sqrt(sigma2_squared)
    rho = covariance[0, 1] / (sigma1 * sigma2)
    if not abs(rho) < 1:
        raise DegenerateDistributionError("decorrelation needs |rho| < 1, got " + str(rho))
    root = math.sqrt(1 - rho * rho)
    # (2,2) entry normalises Var(X̃₂) to 1
    matrix = np.array([
        [1 / sigma1, 0.0],
        [-rho / (sigma1 * root), 1 / (sigma2 * root)],
    ])
    return DecorrelationResult(matrix, math.acos(-rho))
