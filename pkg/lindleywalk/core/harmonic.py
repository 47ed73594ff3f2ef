import logging
import math
import warnings
from typing import List, Optional

import numpy as np
from scipy.sparse import csr_matrix, identity
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from lindleywalk.core.classification import classify_regime
from lindleywalk.core.common import CaseLabel, CENTERED_TOLERANCE, DEFAULT_BLOCK_SIZE, DegenerateDistributionError, \
    NotLatticeError, RegimeMismatchError, SingularSystemError, StreamPurpose
from lindleywalk.core.distributions import FiniteSupport1D, IncrementDistribution, Marginal1D, ProductOfMarginals
from lindleywalk.core.lyapunov import LyapunovSpec, lyapunov_build
from lindleywalk.core.moments import check_assumptions, moments
from lindleywalk.core.path_batches import overshoot_summary, simulate_exit_block
from lindleywalk.core.random_streams import RngStream, block_stream, derived_seed

logger = logging.getLogger(__name__)

DEFAULT_LADDER_HORIZON = 10 ** 6
# Largest number of increments drawn at once while chasing ladder epochs
LADDER_CHUNK_BUDGET = 4 * 10 ** 6


class HarmonicEstimate:
    def __init__(self, point, value: float, stat_error: float, truncation_bias_bound: Optional[float], method: str,
                 method_parameters, censored_fraction: Optional[float] = None):
        self.point = point
        self.value = value
        self.stat_error = stat_error
        # None when no bound is available
        self.truncation_bias_bound = truncation_bias_bound
        self.method = method
        self.method_parameters = method_parameters
        self.censored_fraction = censored_fraction

    @property
    def negative_beyond_noise(self) -> bool:
        return self.value < -3 * self.stat_error

    def to_json(self):
        return {
            "point": self.point,
            "value": self.value,
            "stat_error": self.stat_error,
            "truncation_bias_bound": self.truncation_bias_bound,
            "method": self.method,
            "method_parameters": self.method_parameters,
            "censored_fraction": self.censored_fraction
        }


def _require_centered(marginal: Marginal1D):
    if abs(marginal.mean()) >= CENTERED_TOLERANCE:
        raise RegimeMismatchError("harmonic function h1 needs a centered law, mean is " + str(marginal.mean()))
    if not math.isfinite(marginal.variance()):
        raise RegimeMismatchError("harmonic function h1 needs a finite variance")


# The one-dimensional walk as a planar walk whose second coordinate never moves
def embed_marginal(marginal: Marginal1D) -> IncrementDistribution:
    return ProductOfMarginals(marginal, FiniteSupport1D([(0.0, 1.0)]))


def h1_estimate(marginal: Marginal1D, x: float, horizon: int, paths: int, master_seed: int,
                block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1) -> HarmonicEstimate:
    """h₁(x) = x - E[x + S(τₓ) ; τₓ < inf] by Monte Carlo.

    Paths still alive at the horizon contribute 0, so the value is at most h₁(x); the reported bias bound is
    the mean over paths of A m(y) + R at the censoring position y.
    """
    _require_centered(marginal)
    if not x > 0:
        raise ValueError("h1 needs x > 0, got " + str(x))
    spec = lyapunov_build(marginal)
    summary = overshoot_summary(embed_marginal(marginal), (x, 1.0), horizon, paths, master_seed, block_size,
                                workers, censored_bound=spec.overshoot_bound)
    mean_overshoot, stat_error = summary.mean_and_stat_error()
    return HarmonicEstimate(x, x - mean_overshoot, stat_error, summary.censored_bound_sum / paths, "monte_carlo",
                            {"horizon": horizon, "paths": paths, "master_seed": master_seed},
                            summary.censored_fraction)


class LatticeHarmonicSolution:
    """h₁ on {1, ..., L} from the killed-walk equations with closure h₁(y) = y above L."""

    def __init__(self, marginal: Marginal1D, L: int, values: np.ndarray, lyapunov: LyapunovSpec):
        self.marginal = marginal
        self.L = L
        self.values = values
        self.lyapunov = lyapunov
        steps = [int(v) for v, _ in marginal.atoms()]
        self.up_width = max(max(steps), 0)
        self.down_width = max(-min(steps), 0)

    def extended(self, y: int) -> float:
        if y <= 0:
            return 0.0
        if y > self.L:
            return float(y)
        return float(self.values[y - 1])

    def value(self, x: int) -> float:
        return self.extended(x)

    # h₁(y) - E[h₁(y + X) ; y + X > 0] for y = 1..L
    def residuals(self) -> np.ndarray:
        ys = np.arange(1, self.L + 1)
        expected = np.zeros(self.L)
        for v, p in self.marginal.atoms():
            targets = ys + int(v)
            contributions = np.where(targets > self.L, targets.astype(float), 0.0)
            inside = (targets >= 1) & (targets <= self.L)
            contributions[inside] = self.values[targets[inside] - 1]
            expected += p * contributions
        return self.values - expected

    # Minimum over (0, 1]; on the integer lattice only y = 1 lies there
    @property
    def d_measured(self) -> float:
        return float(self.values[0])

    def lower_bound_violations(self, tolerance: float = 1e-9) -> List[int]:
        ys = np.arange(1, self.L + 1)
        bound = np.maximum(ys, self.d_measured)
        return [int(y) for y in ys[self.values < bound - tolerance * np.maximum(1.0, bound)]]

    def truncation_bias_bound(self, x: int) -> float:
        # the solution is low by E_x[h₁(Y) - Y ; the walk jumps above L before dying], with
        # h₁(Y) - Y <= A m(Y) + R and the jump probability bounded by optional stopping
        lowest = 1 - self.down_width
        escape_probability = min(1.0, (x - lowest) / (self.L + 1 - lowest))
        return self.lyapunov.overshoot_bound(self.L + self.up_width) * escape_probability


def solve_h1_lattice(marginal: Marginal1D, L: int) -> LatticeHarmonicSolution:
    atoms = marginal.atoms()
    if atoms is None or not marginal.is_integer_lattice():
        raise NotLatticeError("lattice solver needs a finite support on the integers")
    _require_centered(marginal)
    steps = [int(v) for v, _ in atoms]
    if L <= 2 * (max(max(steps), 0) + max(-min(steps), 0)):
        raise ValueError("truncation L=" + str(L) + " is not large against the support width")
    lyapunov = lyapunov_build(marginal)
    rows, columns, entries = [], [], []
    rhs = np.zeros(L)
    ys = np.arange(1, L + 1)
    for v, p in atoms:
        targets = ys + int(v)
        inside = (targets >= 1) & (targets <= L)
        rows.extend(ys[inside] - 1)
        columns.extend(targets[inside] - 1)
        entries.extend([p] * int(inside.sum()))
        above = targets > L
        rhs[above] += p * targets[above]
    transition = csr_matrix((entries, (rows, columns)), shape=(L, L))
    system = (identity(L, format='csr') - transition).tocsc()
    logger.info("Solving killed-walk equations on {1..%d}", L)
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            values = spsolve(system, rhs)
            # one round of iterative refinement
            values = values + spsolve(system, rhs - system @ values)
        except MatrixRankWarning as e:
            raise SingularSystemError("killed-walk system is singular: " + str(e))
    if not np.all(np.isfinite(values)):
        raise SingularSystemError("killed-walk system has no finite solution")
    return LatticeHarmonicSolution(marginal, L, values, lyapunov)


def h1_exact_lattice(marginal: Marginal1D, x: int, L: int) -> HarmonicEstimate:
    if int(x) != x or not 1 <= x <= L:
        raise ValueError("x must be an integer in 1.." + str(L) + ", got " + str(x))
    solution = solve_h1_lattice(marginal, L)
    return HarmonicEstimate(x, solution.value(int(x)), 0.0, solution.truncation_bias_bound(int(x)),
                            "lattice_exact", {"L": L})


# Orients a case (d) law so that the first coordinate is the centered one
def oriented_case_d(dist: IncrementDistribution, x):
    classification = classify_regime(moments(dist), assumptions=check_assumptions(dist))
    if classification.case_label != CaseLabel.D_MIXED:
        raise RegimeMismatchError("two-dimensional h needs case D, got " + classification.case_label.name
                                  + (" (" + classification.reason + ")" if classification.reason else ""))
    if abs(dist.mean()[0]) < CENTERED_TOLERANCE:
        return dist, tuple(x), False
    return dist.swapped(), (x[1], x[0]), True


def h2d_estimate(dist: IncrementDistribution, x, horizon: int, paths: int, master_seed: int,
                 block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1,
                 purpose: StreamPurpose = StreamPurpose.EXIT_TIMES) -> HarmonicEstimate:
    """h(x) = x₁ - E[x₁ + S₁(τₓ) ; τₓ < inf] for case (d), coordinate 1 being the centered one.

    Censored paths contribute 0. If the second coordinate is the centered one the law is swapped first.
    """
    oriented, point, swapped = oriented_case_d(dist, x)
    if not (point[0] > 0 and point[1] > 0):
        raise ValueError("h needs a point in the open quadrant, got " + str(x))
    summary = overshoot_summary(oriented, point, horizon, paths, master_seed, block_size, workers, purpose=purpose)
    mean_overshoot, stat_error = summary.mean_and_stat_error()
    estimate = HarmonicEstimate(list(x), point[0] - mean_overshoot, stat_error, None, "monte_carlo",
                                {"horizon": horizon, "paths": paths, "master_seed": master_seed,
                                 "swapped": swapped},
                                summary.censored_fraction)
    if estimate.negative_beyond_noise:
        logger.warning("h(%s) = %s is negative beyond 3 standard errors", x, estimate.value)
    return estimate


class HarmonicityResidual:
    def __init__(self, point, residual: float, sigma: float):
        self.point = point
        self.residual = residual
        self.sigma = sigma

    @property
    def within_four_sigma(self) -> bool:
        return abs(self.residual) <= 4 * self.sigma

    def to_json(self):
        return {"point": list(self.point), "residual": self.residual, "sigma": self.sigma,
                "within_four_sigma": self.within_four_sigma}


def h2d_harmonicity_residual(dist: IncrementDistribution, x, horizon: int, paths: int, master_seed: int,
                             block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1) -> HarmonicityResidual:
    """h(x) - E[h(x + X) ; x + X in the open quadrant], first step enumerated over the atoms.

    Neighbours are estimated with horizon - 1 so that the censored estimators satisfy the identity exactly in
    expectation; every point uses its own stream.
    """
    atoms = dist.atoms()
    if atoms is None:
        raise NotLatticeError("first-step enumeration needs a finite support")
    centre = h2d_estimate(dist, x, horizon, paths, derived_seed(master_seed, StreamPurpose.HARMONIC_FIRST_STEP, 0),
                          block_size, workers)
    expected = 0.0
    variance = centre.stat_error ** 2
    for k, (v, p) in enumerate(atoms):
        neighbour = (x[0] + v[0], x[1] + v[1])
        if neighbour[0] <= 0 or neighbour[1] <= 0:
            continue
        seed = derived_seed(master_seed, StreamPurpose.HARMONIC_FIRST_STEP, k + 1)
        estimate = h2d_estimate(dist, neighbour, horizon - 1, paths, seed, block_size, workers)
        expected += p * estimate.value
        variance += (p * estimate.stat_error) ** 2
    return HarmonicityResidual(x, centre.value - expected, math.sqrt(variance))


class LadderHeightSampler:
    """Draws S(ℓ₁), the walk at its first strict descending ladder epoch.

    Ladder epochs of a centered walk have P[ℓ₁ > n] of order n^-1/2, so walks that reach the horizon are
    redrawn from a fresh stream and counted in resamples.
    """

    def __init__(self, marginal: Marginal1D, horizon: int = DEFAULT_LADDER_HORIZON):
        _require_centered(marginal)
        if marginal.is_point_mass():
            raise DegenerateDistributionError("ladder heights of a constant walk")
        self.marginal = marginal
        self.horizon = horizon
        self.resamples = 0

    def _attempt(self, count: int, stream: RngStream):
        heights = np.full(count, np.nan)
        alive = np.arange(count)
        positions = np.zeros(count)
        walked = 0
        chunk = 1
        while len(alive) > 0 and walked < self.horizon:
            chunk = min(chunk, self.horizon - walked, max(1, LADDER_CHUNK_BUDGET // len(alive)))
            steps = self.marginal.sample(stream, len(alive) * chunk).reshape(len(alive), chunk)
            paths = positions[:, np.newaxis] + np.cumsum(steps, axis=1)
            below = paths < 0
            done = below.any(axis=1)
            first = np.argmax(below[done], axis=1)
            heights[alive[done]] = paths[done][np.arange(len(first)), first]
            positions = paths[~done, -1]
            alive = alive[~done]
            walked += chunk
            chunk *= 2
        return heights

    def sample_many(self, count: int, stream: RngStream) -> np.ndarray:
        heights = self._attempt(count, stream)
        missing = np.flatnonzero(np.isnan(heights))
        while len(missing) > 0:
            self.resamples += len(missing)
            logger.warning("%d ladder epochs beyond horizon %d, resampling", len(missing), self.horizon)
            stream = stream.spawn(1)[0]
            heights[missing] = self._attempt(len(missing), stream)
            missing = np.flatnonzero(np.isnan(heights))
        return heights

    def sample(self, stream: RngStream) -> float:
        return float(self.sample_many(1, stream)[0])


def ladder_height_sample(marginal: Marginal1D, stream: RngStream,
                         horizon: int = DEFAULT_LADDER_HORIZON) -> float:
    return LadderHeightSampler(marginal, horizon).sample(stream)


class PotentialKernelEstimate:
    def __init__(self, x: float, value: float, stat_error: float, chains: int, resamples: int):
        self.x = x
        self.value = value
        self.stat_error = stat_error
        self.chains = chains
        self.resamples = resamples

    def to_json(self):
        return {"x": self.x, "U": self.value, "stat_error": self.stat_error, "chains": self.chains,
                "ladder_resamples": self.resamples}


# U(x) = sum over k >= 0 of P[S(ℓ_k) in (-x, 0]], one ladder-height chain per sample
def potential_kernel_estimate(marginal: Marginal1D, x: float, num_ladder_chains: int, master_seed: int,
                              horizon: int = DEFAULT_LADDER_HORIZON) -> PotentialKernelEstimate:
    if not x > 0:
        raise ValueError("U needs x > 0, got " + str(x))
    sampler = LadderHeightSampler(marginal, horizon)
    stream = block_stream(master_seed, StreamPurpose.LADDER_CHAINS, 0)
    visits = np.zeros(num_ladder_chains)
    levels = np.zeros(num_ladder_chains)
    alive = np.arange(num_ladder_chains)
    while len(alive) > 0:
        visits[alive] += 1
        levels[alive] += sampler.sample_many(len(alive), stream)
        alive = alive[levels[alive] > -x]
    stat_error = float(visits.std(ddof=1) / math.sqrt(num_ladder_chains)) if num_ladder_chains > 1 else math.inf
    return PotentialKernelEstimate(x, float(visits.mean()), stat_error, num_ladder_chains, sampler.resamples)


def potential_kernel_U(marginal: Marginal1D, x: float, num_ladder_chains: int, master_seed: int,
                       horizon: int = DEFAULT_LADDER_HORIZON) -> float:
    return potential_kernel_estimate(marginal, x, num_ladder_chains, master_seed, horizon).value


class LadderTailBoundRow:
    def __init__(self, t: float, x: float, overshoot_tail: float, bound: float, sigma: float):
        self.t = t
        self.x = x
        self.overshoot_tail = overshoot_tail
        self.bound = bound
        self.sigma = sigma

    @property
    def holds(self) -> bool:
        return self.overshoot_tail <= self.bound + 4 * self.sigma


# P[x + S(τₓ) < -t] against U(m) P[S(ℓ₁) < -t] for x <= m
def ladder_tail_bound_table(marginal: Marginal1D, xs: List[float], ts: List[float], m: float, samples: int,
                            master_seed: int, horizon: int = 10 ** 4) -> List[LadderTailBoundRow]:
    if max(xs) > m:
        raise ValueError("every x must be <= m")
    kernel = potential_kernel_estimate(marginal, m, samples, derived_seed(master_seed, StreamPurpose.OVERSHOOT_TABLE, 0))
    ladder_stream = block_stream(derived_seed(master_seed, StreamPurpose.OVERSHOOT_TABLE, 1),
                                 StreamPurpose.LADDER_CHAINS, 0)
    heights = LadderHeightSampler(marginal).sample_many(samples, ladder_stream)
    walk = embed_marginal(marginal)
    rows = []
    for k, x in enumerate(xs):
        stream = block_stream(derived_seed(master_seed, StreamPurpose.OVERSHOOT_TABLE, k + 2),
                              StreamPurpose.EXIT_TIMES, 0)
        batch = simulate_exit_block(walk, (x, 1.0), horizon, samples, stream)
        overshoots = np.where(batch.censored, 0.0, batch.overshoot1)
        for t in ts:
            tail = float(np.mean(overshoots < -t))
            ladder_tail = float(np.mean(heights < -t))
            sigma = math.sqrt(tail * (1 - tail) / samples
                              + (kernel.value ** 2) * ladder_tail * (1 - ladder_tail) / samples
                              + (ladder_tail * kernel.stat_error) ** 2)
            rows.append(LadderTailBoundRow(t, x, tail, kernel.value * ladder_tail, sigma))
    return rows
