"""Superharmonic function V(x) = x + A m(x) + R of the centered one-dimensional walk killed on leaving (0, inf).

a(x) = E[(X⁻ - x)⁺], b(x) = E[((X⁻ - x)⁺)²] / 2, m(x) = integral of b over [0, x] = E[(X⁻)³ - ((X⁻ - x)⁺)³] / 6,
ā(x) = E[(X - x)⁺], F(x) = P[X <= x]. A = 4 / E(X⁻)², x₀ is the smallest root of 2A b(x/2) = 1, and
R = 3 E(X⁻) / F(-x₀) when F(-x₀) > 0, else R = 3 x₀.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from lindleywalk.core.common import BisectionError, CENTERED_TOLERANCE, DegenerateDistributionError, \
    RegimeMismatchError, StreamPurpose
from lindleywalk.core.distributions import Marginal1D
from lindleywalk.core.random_streams import block_stream

logger = logging.getLogger(__name__)

BISECTION_TOLERANCE = 1e-10
MAX_BRACKET_DOUBLINGS = 200


class LyapunovSpec:
    def __init__(self, marginal: Marginal1D, A: float, x0: float, R: float):
        self.marginal = marginal
        self.A = A
        self.x0 = x0
        self.R = R

    def a(self, x: float) -> float:
        return self.marginal.negative_excess_moment(1, x)

    def b(self, x: float) -> float:
        return self.marginal.negative_excess_moment(2, x) / 2

    def m(self, x: float) -> float:
        return self.marginal.negative_cubic_increment(x) / 6

    def a_bar(self, x: float) -> float:
        return self.marginal.positive_excess_mean(x)

    def V(self, x: float) -> float:
        return x + self.A * self.m(x) + self.R

    # Bound on the overshoot still missing for a path censored at x: 0 <= -E_x[x + S(τ)] <= A m(x) + R
    def overshoot_bound(self, x: float) -> float:
        return self.A * self.m(max(x, 0.0)) + self.R

    # E[V(x + X) ; x + X > 0] - V(x)
    def drift(self, x: float) -> float:
        atoms = self.marginal.atoms()
        if atoms is not None:
            return self.marginal.killed_expectation(self.V, x) - self.V(x)
        # differenced form, which keeps the quadrature away from the large value V(x)
        m_x = self.m(x)
        jump = self.marginal.killed_expectation(lambda y: self.m(y) - m_x, x)
        return self.a(x) - (self.R + self.A * m_x) * self.marginal.cdf(-x) + self.A * jump

    def table(self, grid: List[float]) -> List[Tuple[float, float, float, float, float, float, float]]:
        return [(x, self.a(x), self.b(x), self.m(x), self.a_bar(x), self.V(x), self.drift(x)) for x in grid]

    def to_json(self):
        return {"A": self.A, "x0": self.x0, "R": self.R}


# Smallest x with g(x) <= 0 for a non-increasing g with g(0) > 0
def smallest_root(g, tolerance: float = BISECTION_TOLERANCE) -> float:
    low = 0.0
    if not g(low) > 0:
        raise BisectionError("bisection needs g(0) > 0, got " + str(g(low)))
    high = 1.0
    doublings = 0
    while g(high) > 0:
        low = high
        high *= 2
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise BisectionError("no sign change of g found below " + str(high))
    while high - low > tolerance:
        middle = (low + high) / 2
        if g(middle) > 0:
            low = middle
        else:
            high = middle
    return high


# Moves a root found within tolerance of |v|, v a negative atom, onto |v|; F(-x0) then counts that atom
def snap_to_atom(marginal: Marginal1D, x0: float, tolerance: float = 10 * BISECTION_TOLERANCE) -> float:
    atoms = marginal.atoms()
    if atoms is None:
        return x0
    for v, _ in atoms:
        if v < 0 and abs(x0 + v) <= tolerance:
            return float(-v)
    return x0


def lyapunov_build(marginal: Marginal1D) -> LyapunovSpec:
    if abs(marginal.mean()) >= CENTERED_TOLERANCE:
        raise RegimeMismatchError("Lyapunov construction needs a centered law, mean is " + str(marginal.mean()))
    if not math.isfinite(marginal.variance()):
        raise RegimeMismatchError("Lyapunov construction needs a finite variance")
    negative_second_moment = marginal.negative_part_moment(2)
    if not negative_second_moment > 0:
        raise DegenerateDistributionError("X- is almost surely 0")
    A = 4 / negative_second_moment

    def g(x: float) -> float:
        return 2 * A * marginal.negative_excess_moment(2, x / 2) / 2 - 1

    # g(0) = 2 A E(X⁻)² / 2 - 1 = 3 in exact arithmetic
    if abs(g(0.0) - 3) > 1e-6:
        logger.warning("bisection start value %s differs from 3", g(0.0))
    x0 = snap_to_atom(marginal, smallest_root(g))
    mass_below = marginal.cdf(-x0)
    if mass_below > 0:
        R = 3 * marginal.negative_part_mean() / mass_below
    else:
        R = 3 * x0
    logger.info("Lyapunov constants A=%s x0=%s R=%s", A, x0, R)
    return LyapunovSpec(marginal, A, x0, R)


def V(spec: LyapunovSpec, x: float) -> float:
    return spec.V(x)


class SuperharmonicReport:
    def __init__(self, grid: List[float], drifts: List[float], tolerance: float):
        self.grid = grid
        self.drifts = drifts
        self.tolerance = tolerance

    @property
    def max_drift(self) -> float:
        return max(self.drifts)

    @property
    def argmax(self) -> float:
        return self.grid[int(np.argmax(self.drifts))]

    def violations(self) -> List[Tuple[float, float]]:
        return [(x, d) for x, d in zip(self.grid, self.drifts) if d > self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.violations()

    def to_json(self):
        return {
            "max_drift": self.max_drift,
            "argmax": self.argmax,
            "tolerance": self.tolerance,
            "violations": [{"x": x, "drift": d} for x, d in self.violations()]
        }


def default_superharmonic_tolerance(marginal: Marginal1D) -> float:
    return 1e-12 if marginal.atoms() is not None else 1e-6


def superharmonic_check(spec: LyapunovSpec, marginal: Marginal1D, grid: List[float],
                        tolerance: Optional[float] = None) -> SuperharmonicReport:
    if marginal is not spec.marginal:
        logger.debug("superharmonic check uses a marginal other than the one the constants were built from")
    if tolerance is None:
        tolerance = default_superharmonic_tolerance(marginal)
    checked = LyapunovSpec(marginal, spec.A, spec.x0, spec.R)
    return SuperharmonicReport(list(grid), [checked.drift(x) for x in grid], tolerance)


# Lyapunov functions a, b non-increasing and m non-decreasing and concave on the grid
def monotonicity_violations(spec: LyapunovSpec, grid: List[float], tolerance: float = 1e-12) -> List[str]:
    violations = []
    values = {"a": [spec.a(x) for x in grid], "b": [spec.b(x) for x in grid], "m": [spec.m(x) for x in grid]}
    for name, sign in [("a", -1), ("b", -1), ("m", 1)]:
        steps = np.diff(values[name]) * sign
        if np.any(steps < -tolerance):
            violations.append(name + " is not " + ("non-decreasing" if sign > 0 else "non-increasing"))
    # concavity of m through its slopes between grid points
    slopes = np.diff(values["m"]) / np.diff(grid)
    bends = np.diff(slopes) * np.diff(grid)[1:]
    if np.any(bends > 2 * tolerance * np.maximum(1.0, np.abs(values["m"][2:]))):
        violations.append("m is not concave")
    return violations


class DominanceCheck:
    def __init__(self, bound: float, estimate: float, stat_error: float):
        self.bound = bound
        self.estimate = estimate
        self.stat_error = stat_error

    @property
    def passed(self) -> bool:
        return self.estimate <= self.bound + 4 * self.stat_error


# Monte Carlo E[x + S(n) ; τₓ > n] against V(x)
def lyapunov_dominance_check(spec: LyapunovSpec, marginal: Marginal1D, x: float, n: int, paths: int,
                             master_seed: int) -> DominanceCheck:
    stream = block_stream(master_seed, StreamPurpose.LYAPUNOV_DOMINANCE, 0)
    positions = np.full(paths, float(x))
    alive = np.ones(paths, dtype=bool)
    for _ in range(n):
        positions[alive] += marginal.sample(stream, int(alive.sum()))
        alive &= positions > 0
    contributions = np.where(alive, positions, 0.0)
    return DominanceCheck(spec.V(x), float(contributions.mean()),
                          float(contributions.std(ddof=1) / math.sqrt(paths)))
