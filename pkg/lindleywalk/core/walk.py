import csv
from typing import List, Optional, Union

import numpy as np

from lindleywalk.core.common import ExitCoordinate
from lindleywalk.core.distributions import IncrementDistribution
from lindleywalk.core.math import Point, abs_point, as_point, clip_to_quadrant, is_in_closed_quadrant, \
    is_in_open_quadrant, subtract_points
from lindleywalk.core.random_streams import RngStream

# Increments drawn per call while a single path is walked to its exit
EXIT_TIME_CHUNK = 1024


def lindley_step(w: Point, x: Point) -> Point:
    if not is_in_closed_quadrant(w):
        raise ValueError("Lindley state must be in the closed quadrant, got " + str(w))
    return clip_to_quadrant(subtract_points(w, x))


def lindley_path_from_increments(w0: Point, increments) -> List[Point]:
    path = [as_point(w0)]
    for x in increments:
        path.append(lindley_step(path[-1], as_point(x)))
    return path


def lindley_path(dist: IncrementDistribution, w0: Point, n: int, stream: RngStream) -> List[Point]:
    if n < 0:
        raise ValueError("path length must be >= 0, got " + str(n))
    return lindley_path_from_increments(w0, dist.sample_points(stream, n))


def reflected_step(r: Point, x: Point) -> Point:
    if not is_in_closed_quadrant(r):
        raise ValueError("reflected state must be in the closed quadrant, got " + str(r))
    return abs_point(subtract_points(r, x))


def reflected_path_from_increments(r0: Point, increments) -> List[Point]:
    path = [as_point(r0)]
    for x in increments:
        path.append(reflected_step(path[-1], as_point(x)))
    return path


def reflected_path(dist: IncrementDistribution, r0: Point, n: int, stream: RngStream) -> List[Point]:
    return reflected_path_from_increments(r0, dist.sample_points(stream, n))


# W⁰(n) = max over k <= n of -(S(n) - S(n-k)) = max_{j <= n} S(j) - S(n)
def dual_waiting_time(increments) -> Point:
    increments = np.asarray(increments, dtype=float).reshape(-1, 2)
    partial_sums = np.vstack((np.zeros((1, 2)), np.cumsum(increments, axis=0)))
    waiting = partial_sums.max(axis=0) - partial_sums[-1]
    return float(waiting[0]), float(waiting[1])


# increments: trials x n x d. Returns trials x (n+1) x d Lindley states from w0
def lindley_paths_batch(increments: np.ndarray, w0) -> np.ndarray:
    trials, n, d = increments.shape
    states = np.empty((trials, n + 1, d))
    states[:, 0, :] = w0
    for k in range(n):
        states[:, k + 1, :] = np.maximum(0.0, states[:, k, :] - increments[:, k, :])
    return states


# Unrolled form of lindley_paths_batch from w0 = 0, for every prefix length
def dual_waiting_times_batch(increments: np.ndarray) -> np.ndarray:
    trials, n, d = increments.shape
    partial_sums = np.zeros((trials, n + 1, d))
    partial_sums[:, 1:, :] = np.cumsum(increments, axis=1)
    return np.maximum.accumulate(partial_sums, axis=1) - partial_sums


class WalkPath:
    """A stored trajectory of S(n) with its running extrema."""

    def __init__(self, increments: np.ndarray):
        self.increments = np.asarray(increments, dtype=float).reshape(-1, 2)
        self.partial_sums = np.vstack((np.zeros((1, 2)), np.cumsum(self.increments, axis=0)))
        self.running_min = np.minimum.accumulate(self.partial_sums, axis=0)
        self.running_max = np.maximum.accumulate(self.partial_sums, axis=0)

    @staticmethod
    def sample(dist: IncrementDistribution, n: int, stream: RngStream) -> 'WalkPath':
        return WalkPath(dist.sample_points(stream, n))

    def __len__(self):
        return len(self.increments)


class Censored:
    def __init__(self, horizon: int):
        self.horizon = horizon

    def __eq__(self, other):
        return isinstance(other, Censored) and other.horizon == self.horizon

    def __repr__(self):
        return "Censored(" + str(self.horizon) + ")"


class ExitTimeResult:
    def __init__(self, tau: Union[int, Censored], exit_coordinate: ExitCoordinate, overshoot1: Optional[float]):
        self.tau = tau
        self.exit_coordinate = exit_coordinate
        self.overshoot1 = overshoot1

    @property
    def is_censored(self) -> bool:
        return isinstance(self.tau, Censored)

    def __repr__(self):
        return "ExitTimeResult(tau=" + str(self.tau) + ", " + self.exit_coordinate.name + ", overshoot1=" + \
               str(self.overshoot1) + ")"


def exit_coordinate_from_flags(first_out: bool, second_out: bool) -> ExitCoordinate:
    return ExitCoordinate(int(first_out) + 2 * int(second_out))


# First n >= 1 with x + S(n) <= 0 in one coordinate, or None if it never happens on these increments
def coordinate_exit_time(x: float, increments) -> Optional[int]:
    positions = x + np.cumsum(np.asarray(increments, dtype=float))
    exited = np.flatnonzero(positions <= 0)
    if len(exited) == 0:
        return None
    return int(exited[0]) + 1


def exit_time_from_increments(x: Point, increments, horizon: Optional[int] = None) -> ExitTimeResult:
    increments = np.asarray(increments, dtype=float).reshape(-1, 2)
    if horizon is None:
        horizon = len(increments)
    positions = np.asarray(x, dtype=float) + np.cumsum(increments[:horizon], axis=0)
    exited = np.flatnonzero((positions <= 0).any(axis=1))
    if len(exited) == 0:
        return ExitTimeResult(Censored(horizon), ExitCoordinate.NONE, None)
    step = int(exited[0])
    position = positions[step]
    return ExitTimeResult(step + 1, exit_coordinate_from_flags(position[0] <= 0, position[1] <= 0),
                          float(position[0]))


def exit_time(dist: IncrementDistribution, x: Point, horizon: int, stream: RngStream) -> ExitTimeResult:
    if not is_in_open_quadrant(x):
        raise ValueError("start point must be in the open quadrant, got " + str(x))
    if horizon < 1:
        raise ValueError("horizon must be >= 1, got " + str(horizon))
    position = np.array(x, dtype=float)
    walked = 0
    while walked < horizon:
        chunk = min(EXIT_TIME_CHUNK, horizon - walked)
        increments = dist.sample_points(stream, chunk)
        result = exit_time_from_increments(position, increments)
        if not result.is_censored:
            return ExitTimeResult(walked + result.tau, result.exit_coordinate, result.overshoot1)
        position = position + increments.sum(axis=0)
        walked += chunk
    return ExitTimeResult(Censored(horizon), ExitCoordinate.NONE, None)


class ContractionReport:
    def __init__(self, distances: np.ndarray):
        self.distances = distances

    @property
    def non_increasing(self) -> bool:
        # one rounding per step may widen a distance by an ulp of the states
        return bool(np.all(np.diff(self.distances, axis=0) <= 1e-12 * np.maximum(1.0, self.distances[:-1])))


def contraction_check(dist: IncrementDistribution, x: Point, y: Point, n: int, stream: RngStream) -> ContractionReport:
    increments = dist.sample_points(stream, n)[np.newaxis]
    from_x = lindley_paths_batch(increments, np.asarray(x, dtype=float))[0]
    from_y = lindley_paths_batch(increments, np.asarray(y, dtype=float))[0]
    return ContractionReport(np.abs(from_x - from_y))


def write_trajectory_csv(file_path: str, increments, w0: Point, r0: Point):
    walk = WalkPath(increments)
    lindley = lindley_path_from_increments(w0, walk.increments)
    reflected = reflected_path_from_increments(r0, walk.increments)
    with open(file_path, 'w', newline='') as file:
        writer = csv.writer(file)
        writer.writerow(["n", "S1", "S2", "W1", "W2", "R1", "R2"])
        for n, (s, w, r) in enumerate(zip(walk.partial_sums, lindley, reflected)):
            writer.writerow([n, repr(float(s[0])), repr(float(s[1])), repr(w[0]), repr(w[1]), repr(r[0]),
                             repr(r[1])])
