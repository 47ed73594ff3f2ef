import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np

from lindleywalk.core.common import DEFAULT_BLOCK_SIZE, NotLatticeError, StateSpaceBudgetError
from lindleywalk.core.distributions import IncrementDistribution, Marginal1D
from lindleywalk.core.harmonic import embed_marginal, h1_estimate, h1_exact_lattice
from lindleywalk.core.math import is_in_open_quadrant, wilson_interval
from lindleywalk.core.path_batches import tau_histogram

logger = logging.getLogger(__name__)

MIN_PATHS = 1000
DEFAULT_CELL_BUDGET = 10 ** 7
DEFAULT_LATTICE_TRUNCATION = 10 ** 4


class SurvivalCurve:
    """Estimates of P[τₓ > n] on an n-grid, all from one shared set of paths."""

    def __init__(self, n_grid: List[int], survivors: np.ndarray, paths: int, master_seed: Optional[int], start,
                 censor_horizon: int):
        self.n_grid = list(n_grid)
        self.survivors = np.asarray(survivors, dtype=np.int64)
        self.paths = paths
        self.master_seed = master_seed
        self.start = start
        self.censor_horizon = censor_horizon
        self.estimates = self.survivors / paths
        self.ci_low, self.ci_high = wilson_interval(self.survivors, paths)

    @staticmethod
    def from_estimates(n_grid: List[int], estimates: Sequence[float], paths: int) -> 'SurvivalCurve':
        survivors = np.rint(np.asarray(estimates, dtype=float) * paths).astype(np.int64)
        return SurvivalCurve(n_grid, survivors, paths, None, None, max(n_grid))

    def estimate_at(self, n: int) -> float:
        return float(self.estimates[self.n_grid.index(n)])

    def rows(self):
        return [(n, float(e), float(lo), float(hi))
                for n, e, lo, hi in zip(self.n_grid, self.estimates, self.ci_low, self.ci_high)]

    def to_json(self):
        return {
            "n_grid": self.n_grid,
            "estimates": self.estimates.tolist(),
            "ci_low": self.ci_low.tolist(),
            "ci_high": self.ci_high.tolist(),
            "survivors": self.survivors.tolist(),
            "paths": self.paths,
            "master_seed": self.master_seed,
            "start": list(self.start) if self.start is not None else None,
            "censor_horizon": self.censor_horizon
        }


def _check_grid(n_grid: List[int]):
    if not n_grid:
        raise ValueError("n_grid is empty")
    if any(n < 0 for n in n_grid) or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing non-negative integers")


def survival_curve(dist: IncrementDistribution, x, n_grid: List[int], paths: int, master_seed: int,
                   block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1,
                   censor_horizon: Optional[int] = None) -> SurvivalCurve:
    _check_grid(n_grid)
    if not is_in_open_quadrant(x):
        raise ValueError("start point must be in the open quadrant, got " + str(x))
    if paths < MIN_PATHS:
        raise ValueError("survival curves need at least " + str(MIN_PATHS) + " paths, got " + str(paths))
    horizon = max(n_grid) if censor_horizon is None else censor_horizon
    if horizon < max(n_grid):
        raise ValueError("censor horizon " + str(horizon) + " is below the largest n in the grid")
    histogram = tau_histogram(dist, x, max(horizon, 1), paths, master_seed, block_size, workers)
    exited_by = np.cumsum(histogram[1:])
    survivors = [paths if n == 0 else paths - int(exited_by[n - 1]) for n in n_grid]
    return SurvivalCurve(n_grid, np.array(survivors), paths, master_seed, tuple(x), horizon)


def geometric_grid(n_min: int, n_max: int, points_per_decade: int = 10) -> List[int]:
    decades = math.log10(n_max / n_min)
    raw = np.logspace(math.log10(n_min), math.log10(n_max), int(round(decades * points_per_decade)) + 1)
    return sorted(set(int(round(n)) for n in raw))


def _lattice_atoms(law: Union[IncrementDistribution, Marginal1D]):
    atoms = law.atoms()
    if atoms is None or not law.is_integer_lattice():
        raise NotLatticeError("exact tails need a finite support on the integer lattice")
    if isinstance(law, Marginal1D):
        return [((int(v),), p) for v, p in atoms]
    return [(tuple(int(c) for c in v), p) for v, p in atoms]


def exact_tail_lattice(law: Union[IncrementDistribution, Marginal1D], x, n_max: int,
                       cell_budget: int = DEFAULT_CELL_BUDGET) -> List[float]:
    """Exact P[τₓ > n] for n = 0..n_max by propagating the surviving mass over the open orthant.

    Positions are kept in a dense array on {1, ..., x_i + n_max u_i} per coordinate, u_i being the largest
    up-step; mass that steps to a coordinate <= 0 is dropped.
    """
    atoms = _lattice_atoms(law)
    start = tuple(int(c) for c in np.atleast_1d(x))
    d = len(atoms[0][0])
    if len(start) != d or any(c < 1 for c in start):
        raise ValueError("start must be a positive integer point of dimension " + str(d))
    up = [max(max(v[i] for v, _ in atoms), 0) for i in range(d)]
    shape = tuple(start[i] + n_max * up[i] for i in range(d))
    if np.prod(shape, dtype=float) > cell_budget:
        raise StateSpaceBudgetError("exact tail needs " + str(int(np.prod(shape, dtype=float)))
                                    + " cells, budget is " + str(cell_budget))
    mass = np.zeros(shape)
    mass[tuple(c - 1 for c in start)] = 1.0
    tails = [1.0]
    for _ in range(n_max):
        moved = np.zeros(shape)
        for v, p in atoms:
            source, target = [], []
            for i in range(d):
                # index j moves to j + v[i], both within [0, shape[i])
                low = max(0, -v[i])
                high = min(shape[i], shape[i] - v[i])
                source.append(slice(low, high))
                target.append(slice(low + v[i], high + v[i]))
            moved[tuple(target)] += p * mass[tuple(source)]
        mass = moved
        tails.append(float(mass.sum()))
    return tails


class DoneyRow:
    def __init__(self, n: int, tail: float, kappa_h1: float):
        self.n = n
        self.tail = tail
        self.kappa_h1 = kappa_h1
        self.scaled_tail = math.sqrt(n) * tail
        self.ratio = self.scaled_tail / kappa_h1


class DoneyTable:
    def __init__(self, x: float, kappa: float, h1: float, method: str, rows: List[DoneyRow]):
        self.x = x
        self.kappa = kappa
        self.h1 = h1
        self.method = method
        self.rows = rows

    @property
    def monotone_approach(self) -> bool:
        distances = [abs(row.ratio - 1) for row in self.rows]
        return all(b <= a for a, b in zip(distances, distances[1:]))


def doney_kappa(variance: float) -> float:
    return (math.pi * variance / 2) ** -0.5


def doney_check(marginal: Marginal1D, x: float, n_list: List[int], paths: int = 10 ** 5, master_seed: int = 0,
                L: int = DEFAULT_LATTICE_TRUNCATION, workers: int = 1) -> DoneyTable:
    """√n P[τₓ > n] against κ h₁(x), with κ = (π Var X / 2)^-1/2."""
    kappa = doney_kappa(marginal.variance())
    lattice = marginal.atoms() is not None and marginal.is_integer_lattice() and float(x).is_integer()
    if lattice:
        h1 = h1_exact_lattice(marginal, int(x), max(L, 20 * int(x))).value
        tails = exact_tail_lattice(marginal, int(x), max(n_list))
        values = [tails[n] for n in n_list]
        method = "exact_lattice"
    else:
        h1 = h1_estimate(marginal, x, max(n_list), paths, master_seed, workers=workers).value
        curve = survival_curve(embed_marginal(marginal), (x, 1.0), sorted(n_list), paths, master_seed,
                               workers=workers)
        values = [curve.estimate_at(n) for n in n_list]
        method = "monte_carlo"
    return DoneyTable(x, kappa, h1, method, [DoneyRow(n, tail, kappa * h1) for n, tail in zip(n_list, values)])


class DecayCheck:
    def __init__(self, r: float, constant: float, worst_ratio: float):
        self.r = r
        self.constant = constant
        # largest P(n) / (c n^-r) over the window after its start
        self.worst_ratio = worst_ratio

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0


# Curve eventually below c n^-r, with c fitted at the window start
def decay_check(curve: SurvivalCurve, r: float, window) -> DecayCheck:
    n_min, n_max = window
    points = [(n, e) for n, e in zip(curve.n_grid, curve.estimates) if n_min <= n <= n_max]
    if len(points) < 2:
        raise ValueError("decay check window holds fewer than 2 grid points")
    n_start, e_start = points[0]
    constant = max(float(e_start), 1.0 / curve.paths) * n_start ** r
    worst = max(float(e) / (constant * n ** -r) for n, e in points[1:])
    return DecayCheck(r, constant, worst)


class FlatTailCheck:
    def __init__(self, n_ref: int, n_end: int, reference: float, reference_ci, end: float):
        self.n_ref = n_ref
        self.n_end = n_end
        self.reference = reference
        self.reference_ci = reference_ci
        self.end = end

    @property
    def passed(self) -> bool:
        return self.end > 0 and self.reference_ci[0] <= self.end <= self.reference_ci[1]


def flat_tail_check(curve: SurvivalCurve, n_ref: int, n_end: int) -> FlatTailCheck:
    i = curve.n_grid.index(n_ref)
    return FlatTailCheck(n_ref, n_end, float(curve.estimates[i]), (float(curve.ci_low[i]), float(curve.ci_high[i])),
                         curve.estimate_at(n_end))
