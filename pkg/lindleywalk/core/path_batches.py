"""Vectorised block engines. A block advances all of its paths together and drops them as they exit.

Every block draws from its own stream (see random_streams.block_stream), so the result of a run is the
index-ordered merge of block results and does not depend on how blocks are spread over processes.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from lindleywalk.core.common import DEFAULT_BLOCK_SIZE, StreamPurpose
from lindleywalk.core.distributions import IncrementDistribution
from lindleywalk.core.random_streams import RngStream, block_layout, block_stream, map_blocks

logger = logging.getLogger(__name__)


class ExitTimeBatch:
    """Exit data of a block of paths. tau == 0 marks a path still inside at the horizon."""

    def __init__(self, tau: np.ndarray, exit_coordinate: np.ndarray, overshoot1: np.ndarray,
                 end_positions: np.ndarray):
        self.tau = tau
        self.exit_coordinate = exit_coordinate
        self.overshoot1 = overshoot1
        self.end_positions = end_positions

    @property
    def censored(self) -> np.ndarray:
        return self.tau == 0


def simulate_exit_block(walk_law: IncrementDistribution, start, horizon: int, count: int,
                        stream: RngStream) -> ExitTimeBatch:
    start = np.asarray(start, dtype=float)
    tau = np.zeros(count, dtype=np.int64)
    exit_coordinate = np.zeros(count, dtype=np.int8)
    overshoot1 = np.full(count, np.nan)
    end_positions = np.empty((count, 2))
    alive = np.arange(count)
    positions = np.tile(start, (count, 1))
    for step in range(1, horizon + 1):
        if len(alive) == 0:
            break
        positions += walk_law.sample_points(stream, len(alive))
        out = positions <= 0
        exited = out[:, 0] | out[:, 1]
        if exited.any():
            rows = alive[exited]
            tau[rows] = step
            exit_coordinate[rows] = out[exited, 0] + 2 * out[exited, 1]
            overshoot1[rows] = positions[exited, 0]
            end_positions[rows] = positions[exited]
            still_alive = ~exited
            alive = alive[still_alive]
            positions = positions[still_alive]
    end_positions[alive] = positions
    return ExitTimeBatch(tau, exit_coordinate, overshoot1, end_positions)


class ExitTimeTask:
    def __init__(self, walk_law: IncrementDistribution, start, horizon: int, master_seed: int, block_index: int,
                 count: int, purpose: StreamPurpose = StreamPurpose.EXIT_TIMES):
        self.walk_law = walk_law
        self.start = start
        self.horizon = horizon
        self.master_seed = master_seed
        self.block_index = block_index
        self.count = count
        self.purpose = purpose

    def run(self) -> ExitTimeBatch:
        stream = block_stream(self.master_seed, self.purpose, self.block_index)
        return simulate_exit_block(self.walk_law, self.start, self.horizon, self.count, stream)


def exit_time_tasks(walk_law: IncrementDistribution, start, horizon: int, paths: int, master_seed: int,
                    block_size: int = DEFAULT_BLOCK_SIZE,
                    purpose: StreamPurpose = StreamPurpose.EXIT_TIMES) -> List[ExitTimeTask]:
    return [ExitTimeTask(walk_law, start, horizon, master_seed, block_index, count, purpose)
            for block_index, count in block_layout(paths, block_size)]


# Number of paths with tau == t for t = 0..horizon (index 0 counts censored paths)
def tau_histogram_of_task(task: ExitTimeTask) -> np.ndarray:
    batch = task.run()
    return np.bincount(batch.tau, minlength=task.horizon + 1)


def tau_histogram(walk_law: IncrementDistribution, start, horizon: int, paths: int, master_seed: int,
                  block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1) -> np.ndarray:
    tasks = exit_time_tasks(walk_law, start, horizon, paths, master_seed, block_size)
    logger.info("Simulating %d paths to horizon %d in %d blocks", paths, horizon, len(tasks))
    histograms = map_blocks(tau_histogram_of_task, tasks, workers)
    return np.sum(histograms, axis=0)


class OvershootSummary:
    """Sums over a set of paths of x₁ + S₁(τ) (exited paths) and of a censoring bound (censored paths)."""

    def __init__(self, paths: int, exited: int, overshoot_sum: float, overshoot_square_sum: float,
                 censored_bound_sum: float):
        self.paths = paths
        self.exited = exited
        self.overshoot_sum = overshoot_sum
        self.overshoot_square_sum = overshoot_square_sum
        self.censored_bound_sum = censored_bound_sum

    @staticmethod
    def merge(summaries: List['OvershootSummary']) -> 'OvershootSummary':
        return OvershootSummary(
            sum(s.paths for s in summaries),
            sum(s.exited for s in summaries),
            float(np.sum([s.overshoot_sum for s in summaries])),
            float(np.sum([s.overshoot_square_sum for s in summaries])),
            float(np.sum([s.censored_bound_sum for s in summaries])))

    @property
    def censored_fraction(self) -> float:
        return (self.paths - self.exited) / self.paths

    # Mean and standard error of the per-path contribution (0 for censored paths)
    def mean_and_stat_error(self) -> Tuple[float, float]:
        mean = self.overshoot_sum / self.paths
        if self.paths < 2:
            return mean, float('inf')
        variance = max(self.overshoot_square_sum / self.paths - mean * mean, 0.0) * self.paths / (self.paths - 1)
        return mean, float(np.sqrt(variance / self.paths))


class OvershootTask:
    def __init__(self, exit_task: ExitTimeTask, censored_bound=None):
        self.exit_task = exit_task
        # optional callable of the first coordinate at the horizon, bounding the missing overshoot
        self.censored_bound = censored_bound


def overshoot_of_task(task: OvershootTask) -> OvershootSummary:
    batch = task.exit_task.run()
    exited = ~batch.censored
    overshoots = batch.overshoot1[exited]
    censored_bound_sum = 0.0
    if task.censored_bound is not None and not exited.all():
        ends = batch.end_positions[batch.censored, 0]
        censored_bound_sum = float(np.sum([task.censored_bound(y) for y in ends]))
    return OvershootSummary(task.exit_task.count, int(exited.sum()), float(overshoots.sum()),
                            float(np.square(overshoots).sum()), censored_bound_sum)


def overshoot_summary(walk_law: IncrementDistribution, start, horizon: int, paths: int, master_seed: int,
                      block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1, censored_bound=None,
                      purpose: StreamPurpose = StreamPurpose.EXIT_TIMES) -> OvershootSummary:
    tasks = [OvershootTask(task, censored_bound)
             for task in exit_time_tasks(walk_law, start, horizon, paths, master_seed, block_size, purpose)]
    return OvershootSummary.merge(map_blocks(overshoot_of_task, tasks, workers))


class OriginLindleyTask:
    def __init__(self, walk_law: IncrementDistribution, box, n_max: int, master_seed: int, block_index: int,
                 count: int):
        self.walk_law = walk_law
        self.box = box
        self.n_max = n_max
        self.master_seed = master_seed
        self.block_index = block_index
        self.count = count


# Counts, for n = 0..n_max, the paths of W⁰ inside [0, x₁) x [0, x₂) and at the origin
def origin_lindley_counts(task: OriginLindleyTask) -> Tuple[np.ndarray, np.ndarray]:
    stream = block_stream(task.master_seed, StreamPurpose.LINDLEY_FROM_ORIGIN, task.block_index)
    box = np.asarray(task.box, dtype=float)
    in_box = np.zeros(task.n_max + 1, dtype=np.int64)
    at_origin = np.zeros(task.n_max + 1, dtype=np.int64)
    in_box[0] = task.count
    at_origin[0] = task.count
    states = np.zeros((task.count, 2))
    for n in range(1, task.n_max + 1):
        states = np.maximum(0.0, states - task.walk_law.sample_points(stream, task.count))
        in_box[n] = np.count_nonzero((states[:, 0] < box[0]) & (states[:, 1] < box[1]))
        at_origin[n] = np.count_nonzero((states[:, 0] == 0) & (states[:, 1] == 0))
    return in_box, at_origin


def origin_lindley_histograms(walk_law: IncrementDistribution, box, n_max: int, paths: int, master_seed: int,
                              block_size: int = DEFAULT_BLOCK_SIZE,
                              workers: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    tasks = [OriginLindleyTask(walk_law, box, n_max, master_seed, block_index, count)
             for block_index, count in block_layout(paths, block_size)]
    results = map_blocks(origin_lindley_counts, tasks, workers)
    return np.sum([r[0] for r in results], axis=0), np.sum([r[1] for r in results], axis=0)


class ReflectionViolation:
    def __init__(self, master_seed: int, block_index: int, row: int, step: int, coordinate: int,
                 reflected: float, lindley: float):
        self.master_seed = master_seed
        self.block_index = block_index
        self.row = row
        self.step = step
        self.coordinate = coordinate
        self.reflected = reflected
        self.lindley = lindley

    def to_json(self):
        return {
            "master_seed": self.master_seed,
            "block": self.block_index,
            "row": self.row,
            "step": self.step,
            "coordinate": self.coordinate + 1,
            "reflected": self.reflected,
            "lindley": self.lindley
        }


class ReflectionTask:
    def __init__(self, walk_law: IncrementDistribution, start, delta: float, length: int, master_seed: int,
                 block_index: int, count: int, tolerance: float):
        self.walk_law = walk_law
        self.start = start
        self.delta = delta
        self.length = length
        self.master_seed = master_seed
        self.block_index = block_index
        self.count = count
        self.tolerance = tolerance


# Runs R and W on shared increments; returns the first violation of R <= W + delta per path and coordinate
def reflection_block(task: ReflectionTask) -> Tuple[List[ReflectionViolation], float]:
    stream = block_stream(task.master_seed, StreamPurpose.REFLECTION_PATHS, task.block_index)
    reflected = np.tile(np.asarray(task.start, dtype=float), (task.count, 1))
    lindley = reflected.copy()
    already_reported = np.zeros((task.count, 2), dtype=bool)
    violations = []
    max_excess = -np.inf
    for step in range(1, task.length + 1):
        increments = task.walk_law.sample_points(stream, task.count)
        reflected = np.abs(reflected - increments)
        lindley = np.maximum(0.0, lindley - increments)
        excess = reflected - lindley - task.delta
        max_excess = max(max_excess, float(excess.max()))
        bad = (excess > task.tolerance * np.maximum(1.0, lindley + task.delta)) & ~already_reported
        for row, coordinate in zip(*np.nonzero(bad)):
            violations.append(ReflectionViolation(task.master_seed, task.block_index, int(row), step,
                                                  int(coordinate), float(reflected[row, coordinate]),
                                                  float(lindley[row, coordinate])))
        already_reported |= bad
    return violations, max_excess


def reflection_blocks(walk_law: IncrementDistribution, start, delta: float, paths: int, length: int,
                      master_seed: int, block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1,
                      tolerance: float = 0.0) -> Tuple[List[ReflectionViolation], Optional[float]]:
    tasks = [ReflectionTask(walk_law, start, delta, length, master_seed, block_index, count, tolerance)
             for block_index, count in block_layout(paths, block_size)]
    results = map_blocks(reflection_block, tasks, workers)
    violations = [v for block_violations, _ in results for v in block_violations]
    max_excess = max((excess for _, excess in results), default=None)
    return violations, max_excess


class ReflectionReport:
    def __init__(self, delta: float, paths: int, length: int, violations: List[ReflectionViolation],
                 max_excess: Optional[float], increments_bounded_below: bool, increments_bounded_above: bool):
        self.delta = delta
        self.paths = paths
        self.length = length
        self.violations = violations
        # largest R - W - delta seen on any path
        self.max_excess = max_excess
        # X >= -delta and X <= delta, coordinate-wise over the support
        self.increments_bounded_below = increments_bounded_below
        self.increments_bounded_above = increments_bounded_above

    @property
    def comparison_guaranteed(self) -> bool:
        return self.increments_bounded_above

    def to_json(self):
        return {
            "delta": self.delta,
            "paths": self.paths,
            "length": self.length,
            "max_excess": self.max_excess,
            "increments_bounded_below": self.increments_bounded_below,
            "increments_bounded_above": self.increments_bounded_above,
            "comparison_guaranteed": self.comparison_guaranteed,
            "violations": [v.to_json() for v in self.violations]
        }


# Smallest delta with every increment coordinate <= delta, the condition under which R <= W + delta holds
def delta_from_support(walk_law: IncrementDistribution) -> float:
    upper = max(walk_law.marginal(i).support_bounds()[1] for i in range(2))
    if math.isinf(upper):
        raise ValueError("increments are unbounded above; delta must be given")
    return max(float(upper), 0.0)


def reflection_comparison(walk_law: IncrementDistribution, delta: Optional[float], paths: int, length: int,
                          master_seed: int, block_size: int = DEFAULT_BLOCK_SIZE, workers: int = 1,
                          start=(0.0, 0.0), tolerance: float = 0.0) -> ReflectionReport:
    """R(n) against W(n) + delta on shared increments, both processes started at start."""
    if delta is None:
        delta = delta_from_support(walk_law)
    bounds = [walk_law.marginal(i).support_bounds() for i in range(2)]
    bounded_below = all(low >= -delta for low, _ in bounds)
    bounded_above = all(high <= delta for _, high in bounds)
    if not bounded_above:
        logger.warning("increments exceed delta=%s; R <= W + delta is not guaranteed", delta)
    violations, max_excess = reflection_blocks(walk_law, start, delta, paths, length, master_seed, block_size,
                                               workers, tolerance)
    return ReflectionReport(delta, paths, length, violations, max_excess, bounded_below, bounded_above)
