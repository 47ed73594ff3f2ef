import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import binom, zeta
from scipy.stats import multivariate_normal, norm

from lindleywalk.core.common import DistributionKind, Exactness, InvalidDistributionError, MarginalKind, \
    PROBABILITY_SUM_TOLERANCE

logger = logging.getLogger(__name__)

QUADRATURE_ABS_ERROR = 1e-10
POWER_TAIL_RELATIVE_ERROR = 1e-10
SYMMETRY_TOLERANCE = 1e-12

Atom1D = Tuple[float, float]
Atom2D = Tuple[Tuple[float, float], float]


def _check_probabilities(probabilities: List[float], what: str):
    for p in probabilities:
        if not 0 < p <= 1:
            raise InvalidDistributionError(what + ": atom probability " + str(p) + " is outside (0, 1]")
    total = math.fsum(probabilities)
    if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
        raise InvalidDistributionError(what + ": atom probabilities sum to " + repr(total) + ", not 1")


def _sample_atoms(values: np.ndarray, cumulative: np.ndarray, gen: np.random.Generator, size: int) -> np.ndarray:
    indices = np.searchsorted(cumulative, gen.random(size), side='right')
    return values[np.minimum(indices, len(values) - 1)]


# E[(Z - u)^j ; Z > u] for a standard normal Z, j = 0..3
def _standard_normal_partial_moment(j: int, u: float) -> float:
    tail = norm.sf(u)
    density = norm.pdf(u)
    if j == 0:
        return tail
    if j == 1:
        return density - u * tail
    if j == 2:
        return (1 + u * u) * tail - u * density
    if j == 3:
        return (2 + u * u) * density - u * (3 + u * u) * tail
    raise Exception("Unhandled partial moment order: " + str(j))


class Marginal1D:
    """Law of one coordinate of the increment.

    All expectations below are exact sums (finite support), closed forms (Gaussian) or Hurwitz zeta
    series (power tail). X⁻ = max(-X, 0) throughout.
    """

    def __init__(self, kind: MarginalKind):
        self.kind = kind

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        raise Exception("This method needs to be overridden")

    def mean(self) -> float:
        return self.positive_part_mean() - self.negative_part_mean()

    def variance(self) -> float:
        raise Exception("This method needs to be overridden")

    def positive_part_mean(self) -> float:
        return self.positive_excess_mean(0.0)

    def negative_part_mean(self) -> float:
        return self.negative_excess_moment(1, 0.0)

    def negative_part_moment(self, j: int) -> float:
        return self.negative_excess_moment(j, 0.0)

    # Moments E|X|^r, E(X⁻)^r, E(X⁺)^r are finite exactly for r below these thresholds
    def absolute_moment_threshold(self) -> float:
        return math.inf

    def negative_moment_threshold(self) -> float:
        return math.inf

    def positive_moment_threshold(self) -> float:
        return math.inf

    def exactness(self) -> Tuple[Exactness, float]:
        return Exactness.EXACT, 0.0

    def is_point_mass(self) -> bool:
        return False

    def is_integer_lattice(self) -> bool:
        return False

    def atoms(self) -> Optional[List[Atom1D]]:
        return None

    def support_bounds(self) -> Tuple[float, float]:
        return -math.inf, math.inf

    def cdf(self, x: float) -> float:
        raise Exception("This method needs to be overridden")

    # E[((X⁻ - x)⁺)^j] for x >= 0
    def negative_excess_moment(self, j: int, x: float) -> float:
        raise Exception("This method needs to be overridden")

    # E[(X - x)⁺]
    def positive_excess_mean(self, x: float) -> float:
        raise Exception("This method needs to be overridden")

    # E[(X⁻)³ - ((X⁻ - x)⁺)³], finite as soon as the second moment is
    def negative_cubic_increment(self, x: float) -> float:
        raise Exception("This method needs to be overridden")

    # E[fn(x + X) ; x + X > 0]
    def killed_expectation(self, fn: Callable[[float], float], x: float) -> float:
        raise Exception("This method needs to be overridden")


class FiniteSupport1D(Marginal1D):
    def __init__(self, atoms: List[Atom1D]):
        super().__init__(MarginalKind.FINITE_SUPPORT_1D)
        if not atoms:
            raise InvalidDistributionError("finite support marginal needs at least one atom")
        _check_probabilities([p for _, p in atoms], "finite support marginal")
        self._atoms = sorted((float(v), float(p)) for v, p in atoms)
        self._values = np.array([v for v, _ in self._atoms])
        self._probabilities = np.array([p for _, p in self._atoms])
        self._cumulative = np.cumsum(self._probabilities)

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return _sample_atoms(self._values, self._cumulative, gen, size)

    def _expect(self, fn: Callable[[float], float]) -> float:
        return math.fsum(p * fn(v) for v, p in self._atoms)

    def mean(self) -> float:
        return self._expect(lambda v: v)

    def variance(self) -> float:
        mean = self.mean()
        return self._expect(lambda v: (v - mean) ** 2)

    def is_point_mass(self) -> bool:
        return len(set(v for v, _ in self._atoms)) == 1

    def is_integer_lattice(self) -> bool:
        return all(float(v).is_integer() for v, _ in self._atoms)

    def atoms(self) -> Optional[List[Atom1D]]:
        return list(self._atoms)

    def support_bounds(self) -> Tuple[float, float]:
        return self._atoms[0][0], self._atoms[-1][0]

    def cdf(self, x: float) -> float:
        return math.fsum(p for v, p in self._atoms if v <= x)

    def negative_excess_moment(self, j: int, x: float) -> float:
        return self._expect(lambda v: max(-v - x, 0.0) ** j)

    def positive_excess_mean(self, x: float) -> float:
        return self._expect(lambda v: max(v - x, 0.0))

    def negative_cubic_increment(self, x: float) -> float:
        return self._expect(lambda v: max(-v, 0.0) ** 3 - max(-v - x, 0.0) ** 3)

    def killed_expectation(self, fn: Callable[[float], float], x: float) -> float:
        return math.fsum(p * fn(x + v) for v, p in self._atoms if x + v > 0)


class Gaussian1D(Marginal1D):
    def __init__(self, mean: float, variance: float):
        super().__init__(MarginalKind.GAUSSIAN)
        if not variance > 0:
            raise InvalidDistributionError("Gaussian marginal needs a positive variance, got " + str(variance)
                                           + " (use a single atom for a point mass)")
        self._mean = float(mean)
        self._variance = float(variance)
        self._sigma = math.sqrt(self._variance)

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return gen.normal(self._mean, self._sigma, size)

    def mean(self) -> float:
        return self._mean

    def variance(self) -> float:
        return self._variance

    def cdf(self, x: float) -> float:
        return float(norm.cdf(x, loc=self._mean, scale=self._sigma))

    def negative_excess_moment(self, j: int, x: float) -> float:
        # X⁻ - x > 0 iff -X > x, and -X ~ N(-mean, variance)
        u = (x + self._mean) / self._sigma
        return self._sigma ** j * _standard_normal_partial_moment(j, u)

    def positive_excess_mean(self, x: float) -> float:
        return self._sigma * _standard_normal_partial_moment(1, (x - self._mean) / self._sigma)

    def negative_cubic_increment(self, x: float) -> float:
        return self.negative_excess_moment(3, 0.0) - self.negative_excess_moment(3, x)

    def killed_expectation(self, fn: Callable[[float], float], x: float) -> float:
        density = norm(loc=x + self._mean, scale=self._sigma).pdf
        value, error = quad(lambda y: fn(y) * density(y), 0.0, math.inf,
                            epsabs=QUADRATURE_ABS_ERROR, epsrel=QUADRATURE_ABS_ERROR, limit=200)
        if error > 10 * QUADRATURE_ABS_ERROR:
            logger.warning("killed expectation at x=%s has quadrature error %s", x, error)
        return value


class PowerNegativeTail(Marginal1D):
    """P[X = -k] = q k^-beta / zeta(beta) for k >= 1, plus an atom at +c of mass 1 - q.

    c is chosen to give the requested mean (shift) when E X⁻ < inf, i.e. beta > 2. With beta <= 2 the mean is
    -inf and c = 1.
    """

    def __init__(self, beta: float, shift: float, negative_mass: float = 0.5):
        super().__init__(MarginalKind.POWER_NEGATIVE_TAIL)
        if not beta > 1:
            raise InvalidDistributionError("power tail exponent beta must be > 1, got " + str(beta))
        if not 0 < negative_mass < 1:
            raise InvalidDistributionError("negative_mass must be in (0, 1), got " + str(negative_mass))
        self.beta = float(beta)
        self.shift = float(shift)
        self.negative_mass = float(negative_mass)
        self._normalizer = float(zeta(self.beta))
        if self.beta > 2:
            negative_mean = self.negative_mass * float(zeta(self.beta - 1)) / self._normalizer
            self.positive_atom = (self.shift + negative_mean) / (1 - self.negative_mass)
        else:
            if self.shift != 0:
                logger.warning("power tail with beta=%s has infinite negative mean; shift %s ignored",
                               self.beta, self.shift)
            self.positive_atom = 1.0
        if not self.positive_atom > 0:
            raise InvalidDistributionError("requested mean " + str(shift) + " needs a non-positive compensating atom "
                                           + str(self.positive_atom))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        is_negative = gen.random(size) < self.negative_mass
        magnitudes = gen.zipf(self.beta, size)
        return np.where(is_negative, -magnitudes.astype(float), self.positive_atom)

    def variance(self) -> float:
        if self.beta <= 3:
            return math.inf
        second = self.negative_part_moment(2) + (1 - self.negative_mass) * self.positive_atom ** 2
        return second - self.mean() ** 2

    def absolute_moment_threshold(self) -> float:
        return self.beta - 1

    def negative_moment_threshold(self) -> float:
        return self.beta - 1

    def exactness(self) -> Tuple[Exactness, float]:
        return Exactness.NUMERICAL, POWER_TAIL_RELATIVE_ERROR

    def is_integer_lattice(self) -> bool:
        return self.positive_atom.is_integer()

    def support_bounds(self) -> Tuple[float, float]:
        return -math.inf, self.positive_atom

    def cdf(self, x: float) -> float:
        if x >= self.positive_atom:
            return 1.0
        if x >= 0:
            return self.negative_mass
        return self.negative_mass * float(zeta(self.beta, math.ceil(-x))) / self._normalizer

    # sum over k >= k0 of k^(i - beta)
    def _tail_sum(self, i: int, k0: int) -> float:
        if self.beta - i <= 1:
            return math.inf
        return float(zeta(self.beta - i, k0))

    def negative_excess_moment(self, j: int, x: float) -> float:
        k0 = math.floor(x) + 1
        if self.beta - j <= 1:
            return math.inf
        # (k - x)^j expanded binomially so that each piece is a Hurwitz zeta value
        total = math.fsum(binom(j, i) * (-x) ** (j - i) * self._tail_sum(i, k0) for i in range(j + 1))
        return self.negative_mass / self._normalizer * max(total, 0.0)

    def positive_excess_mean(self, x: float) -> float:
        return (1 - self.negative_mass) * max(self.positive_atom - x, 0.0)

    def negative_cubic_increment(self, x: float) -> float:
        if self.beta <= 3:
            return math.inf
        k0 = math.floor(x) + 1
        near = np.arange(1, k0, dtype=float)
        near_part = math.fsum(near ** (3 - self.beta))
        far_part = 3 * x * self._tail_sum(2, k0) - 3 * x * x * self._tail_sum(1, k0) + x ** 3 * self._tail_sum(0, k0)
        return self.negative_mass / self._normalizer * (near_part + far_part)

    def killed_expectation(self, fn: Callable[[float], float], x: float) -> float:
        ks = range(1, math.ceil(x))
        negative_part = math.fsum(k ** -self.beta * fn(x - k) for k in ks if x - k > 0)
        return (self.negative_mass / self._normalizer * negative_part
                + (1 - self.negative_mass) * fn(x + self.positive_atom))


class IncrementDistribution:
    """Law of X = (X₁, X₂). Immutable once built."""

    def __init__(self, kind: DistributionKind):
        self.kind = kind

    def sample_points(self, gen: np.random.Generator, count: int) -> np.ndarray:
        raise Exception("This method needs to be overridden")

    def sample(self, gen: np.random.Generator) -> Tuple[float, float]:
        point = self.sample_points(gen, 1)[0]
        return float(point[0]), float(point[1])

    def marginal(self, i: int) -> Marginal1D:
        raise Exception("This method needs to be overridden")

    def mean(self) -> Tuple[float, float]:
        return self.marginal(0).mean(), self.marginal(1).mean()

    def covariance(self) -> np.ndarray:
        raise Exception("This method needs to be overridden")

    def atoms(self) -> Optional[List[Atom2D]]:
        return None

    def is_integer_lattice(self) -> bool:
        return False

    def swapped(self) -> 'IncrementDistribution':
        raise Exception("This method needs to be overridden")

    def quadrant_probability(self) -> float:
        raise Exception("This method needs to be overridden")

    def support_on_line(self) -> bool:
        raise Exception("This method needs to be overridden")


class FiniteSupport2D(IncrementDistribution):
    def __init__(self, atoms: List[Atom2D]):
        super().__init__(DistributionKind.FINITE_SUPPORT_2D)
        if not atoms:
            raise InvalidDistributionError("finite support distribution needs at least one atom")
        _check_probabilities([p for _, p in atoms], "finite support distribution")
        self._atoms = [((float(v[0]), float(v[1])), float(p)) for v, p in atoms]
        self._points = np.array([v for v, _ in self._atoms])
        self._cumulative = np.cumsum([p for _, p in self._atoms])

    def sample_points(self, gen: np.random.Generator, count: int) -> np.ndarray:
        indices = np.searchsorted(self._cumulative, gen.random(count), side='right')
        return self._points[np.minimum(indices, len(self._atoms) - 1)]

    def marginal(self, i: int) -> Marginal1D:
        probabilities_by_value = {}
        for v, p in self._atoms:
            probabilities_by_value[v[i]] = probabilities_by_value.get(v[i], 0.0) + p
        return FiniteSupport1D(list(probabilities_by_value.items()))

    def covariance(self) -> np.ndarray:
        mean = self.mean()
        entries = [[math.fsum(p * (v[a] - mean[a]) * (v[b] - mean[b]) for v, p in self._atoms) for b in range(2)]
                   for a in range(2)]
        return np.array(entries)

    def atoms(self) -> Optional[List[Atom2D]]:
        return list(self._atoms)

    def is_integer_lattice(self) -> bool:
        return all(c.is_integer() for v, _ in self._atoms for c in v)

    def swapped(self) -> IncrementDistribution:
        return FiniteSupport2D([((v[1], v[0]), p) for v, p in self._atoms])

    def quadrant_probability(self) -> float:
        return math.fsum(p for v, p in self._atoms if v[0] > 0 and v[1] > 0)

    def support_on_line(self) -> bool:
        centered = self._points - self._points.mean(axis=0)
        return np.linalg.matrix_rank(centered, tol=1e-12) < 2


class BivariateGaussian(IncrementDistribution):
    def __init__(self, mean: Tuple[float, float], covariance):
        super().__init__(DistributionKind.BIVARIATE_GAUSSIAN)
        self._mean = np.array([float(mean[0]), float(mean[1])])
        self._covariance = np.array(covariance, dtype=float)
        if self._covariance.shape != (2, 2):
            raise InvalidDistributionError("covariance must be a 2x2 matrix")
        if abs(self._covariance[0, 1] - self._covariance[1, 0]) > SYMMETRY_TOLERANCE:
            raise InvalidDistributionError("covariance matrix is not symmetric")
        eigenvalues, eigenvectors = np.linalg.eigh(self._covariance)
        if eigenvalues[0] < -SYMMETRY_TOLERANCE * max(1.0, eigenvalues[1]):
            raise InvalidDistributionError("covariance matrix is not positive semi-definite")
        self._eigenvalues = np.maximum(eigenvalues, 0.0)
        self._factor = eigenvectors * np.sqrt(self._eigenvalues)

    def sample_points(self, gen: np.random.Generator, count: int) -> np.ndarray:
        z = gen.standard_normal((count, 2))
        return z @ self._factor.T + self._mean

    def marginal(self, i: int) -> Marginal1D:
        if self._covariance[i, i] > 0:
            return Gaussian1D(self._mean[i], self._covariance[i, i])
        return FiniteSupport1D([(self._mean[i], 1.0)])

    def mean(self) -> Tuple[float, float]:
        return float(self._mean[0]), float(self._mean[1])

    def covariance(self) -> np.ndarray:
        return self._covariance.copy()

    def rank(self) -> int:
        return int(np.sum(self._eigenvalues > SYMMETRY_TOLERANCE * max(1.0, self._eigenvalues[1])))

    def swapped(self) -> IncrementDistribution:
        return BivariateGaussian((self._mean[1], self._mean[0]), self._covariance[::-1, ::-1])

    def quadrant_probability(self) -> float:
        mean = self._mean
        variances = np.diag(self._covariance)
        rank = self.rank()
        if rank == 0:
            return 1.0 if mean[0] > 0 and mean[1] > 0 else 0.0
        if variances[0] == 0 or variances[1] == 0:
            # a constant coordinate is independent of the other one
            return (1 - self.marginal(0).cdf(0.0)) * (1 - self.marginal(1).cdf(0.0))
        if self._covariance[0, 1] == 0:
            return float(norm.cdf(mean[0] / math.sqrt(variances[0])) * norm.cdf(mean[1] / math.sqrt(variances[1])))
        if rank == 1:
            return self._line_quadrant_probability()
        # P[X₁ > 0, X₂ > 0] = P[-X₁ < 0, -X₂ < 0]
        return float(multivariate_normal.cdf(np.zeros(2), mean=-mean, cov=self._covariance,
                                             abseps=1e-8, releps=1e-8))

    # X = mean + t v with t standard normal; the open quadrant is an interval of t
    def _line_quadrant_probability(self) -> float:
        direction = self._factor[:, 1]
        low, high = -math.inf, math.inf
        for i in range(2):
            if direction[i] > 0:
                low = max(low, -self._mean[i] / direction[i])
            elif direction[i] < 0:
                high = min(high, -self._mean[i] / direction[i])
            elif self._mean[i] <= 0:
                return 0.0
        if low >= high:
            return 0.0
        return float(norm.cdf(high) - norm.cdf(low))

    def support_on_line(self) -> bool:
        return self.rank() < 2


class ProductOfMarginals(IncrementDistribution):
    def __init__(self, first: Marginal1D, second: Marginal1D):
        super().__init__(DistributionKind.PRODUCT)
        self.first = first
        self.second = second

    def sample_points(self, gen: np.random.Generator, count: int) -> np.ndarray:
        first_values = self.first.sample(gen, count)
        second_values = self.second.sample(gen, count)
        return np.column_stack((first_values, second_values)).astype(float)

    def marginal(self, i: int) -> Marginal1D:
        if i == 0:
            return self.first
        if i == 1:
            return self.second
        raise Exception("Unhandled coordinate: " + str(i))

    def covariance(self) -> np.ndarray:
        return np.array([[self.first.variance(), 0.0], [0.0, self.second.variance()]])

    def atoms(self) -> Optional[List[Atom2D]]:
        first_atoms = self.first.atoms()
        second_atoms = self.second.atoms()
        if first_atoms is None or second_atoms is None:
            return None
        return [((v1, v2), p1 * p2) for v1, p1 in first_atoms for v2, p2 in second_atoms]

    def is_integer_lattice(self) -> bool:
        return self.first.is_integer_lattice() and self.second.is_integer_lattice()

    def swapped(self) -> IncrementDistribution:
        return ProductOfMarginals(self.second, self.first)

    def quadrant_probability(self) -> float:
        return (1 - self.first.cdf(0.0)) * (1 - self.second.cdf(0.0))

    def support_on_line(self) -> bool:
        return self.first.is_point_mass() or self.second.is_point_mass()
