import logging
import math
from typing import List

import numpy as np

from lindleywalk.config_file import ExperimentConfig, numbers_parameter, points_parameter
from lindleywalk.core.common import ConfigError, DEFAULT_BLOCK_SIZE, ExperimentId, StreamPurpose
from lindleywalk.core.distributions import Marginal1D
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.harmonic import HarmonicEstimate, h1_estimate, h2d_estimate, h2d_harmonicity_residual, \
    ladder_tail_bound_table, oriented_case_d, solve_h1_lattice
from lindleywalk.core.random_streams import derived_seed

logger = logging.getLogger(__name__)

EXPERIMENT_ID = ExperimentId.HARMONIC

MODES = ["h1", "h2d"]
METHODS = ["auto", "lattice", "monte_carlo"]


def _lattice_applies(marginal: Marginal1D, xs: List[float], L: int) -> bool:
    return marginal.atoms() is not None and marginal.is_integer_lattice() \
        and all(float(x).is_integer() and 1 <= x <= L for x in xs)


def _h1_values(marginal: Marginal1D, xs: List[float], config: ExperimentConfig, context: RunContext,
               violations: List[str], report, purpose: StreamPurpose = StreamPurpose.EXIT_TIMES):
    parameters = config.parameters
    method = parameters["method"]
    if method not in METHODS:
        raise ConfigError("unknown method " + method + ". Known methods: " + str(METHODS), "parameters.method")
    L = parameters["L"]
    use_lattice = method == "lattice" or (method == "auto" and _lattice_applies(marginal, xs, L))
    if use_lattice:
        solution = solve_h1_lattice(marginal, L)
        checked_range = min(parameters["residual_range"], L)
        worst_residual = float(np.max(np.abs(solution.residuals()[:checked_range])))
        report["lattice"] = {"L": L, "d_measured": solution.d_measured, "max_abs_residual": worst_residual,
                             "residual_range": checked_range}
        if worst_residual > parameters["residual_tolerance"]:
            violations.append("harmonicity residual " + str(worst_residual) + " on 1.." + str(checked_range))
        below = [y for y in solution.lower_bound_violations() if y <= checked_range]
        if below:
            violations.append("h1(y) < max(y, d) at y = " + str(below[:10]))
        return [HarmonicEstimate(x, solution.value(int(x)), 0.0, solution.truncation_bias_bound(int(x)),
                                 "lattice_exact", {"L": L}) for x in xs]

    estimates = []
    for k, x in enumerate(xs):
        estimate = h1_estimate(marginal, x, parameters["horizon"], parameters["paths"],
                               derived_seed(config.seed, purpose, k), parameters["block_size"], context.workers)
        # the estimate is low by at most its bias bound, and h1(x) >= x
        if estimate.value + estimate.truncation_bias_bound + 4 * estimate.stat_error < x:
            violations.append("h1(" + str(x) + ") = " + str(estimate.value) + " is below x beyond its error bars")
        estimates.append(estimate)
    return estimates


def _run_h1(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    parameters = config.parameters
    marginal = config.law_marginal()
    xs = numbers_parameter(parameters, "x_values")
    if any(x <= 0 for x in xs):
        raise ConfigError("every x must be > 0", "parameters.x_values")
    violations = []
    report = {"mode": "h1"}
    estimates = _h1_values(marginal, xs, config, context, violations, report)
    report["estimates"] = [e.to_json() for e in estimates]

    if parameters["ladder_samples"] > 0:
        m = parameters["ladder_m"]
        table = ladder_tail_bound_table(marginal, [x for x in xs if x <= m], numbers_parameter(parameters, "ladder_ts"),
                                        m, parameters["ladder_samples"],
                                        derived_seed(config.seed, StreamPurpose.OVERSHOOT_TABLE, 0))
        report["overshoot_tail_bound"] = [{"t": row.t, "x": row.x, "overshoot_tail": row.overshoot_tail,
                                           "bound": row.bound, "sigma": row.sigma, "holds": row.holds}
                                          for row in table]
        violations.extend("P[x + S(tau) < -" + str(row.t) + "] above U(m) P[S(l1) < -" + str(row.t) + "] at x="
                          + str(row.x) for row in table if not row.holds)

    rows = [[e.point, e.value, e.value / e.point, e.stat_error, e.truncation_bias_bound, e.method] for e in estimates]
    summary = ", ".join("h1(" + ("%g" % e.point) + ") = " + ("%.6g" % e.value) for e in estimates)
    header = ["x", "h1", "h1_over_x", "stat_error", "truncation_bias_bound", "method"]
    return ExperimentOutcome(header, rows, report, violations, summary)


def _run_h2d(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    parameters = config.parameters
    dist = config.law_distribution()
    points = points_parameter(parameters, "points")
    violations = []
    rows = []
    estimates = []
    oriented, _, swapped = oriented_case_d(dist, points[0])
    centered_coordinate = 1 if swapped else 0
    # h(x) <= h1(x1) for the centered coordinate
    comparisons = _h1_values(oriented.marginal(0), [p[centered_coordinate] for p in points], config, context,
                             violations, {}, StreamPurpose.HALF_LINE_COMPARISON)
    for k, (point, comparison) in enumerate(zip(points, comparisons)):
        estimate = h2d_estimate(dist, point, parameters["horizon"], parameters["paths"],
                                derived_seed(config.seed, StreamPurpose.EXIT_TIMES, k), parameters["block_size"],
                                context.workers)
        joint_sigma = math.sqrt(estimate.stat_error ** 2 + comparison.stat_error ** 2)
        if estimate.value > comparison.value + (comparison.truncation_bias_bound or 0.0) + 3 * joint_sigma:
            violations.append("h(" + str(list(point)) + ") = " + str(estimate.value) + " exceeds h1 = "
                              + str(comparison.value))
        if estimate.negative_beyond_noise:
            violations.append("h(" + str(list(point)) + ") = " + str(estimate.value) + " is negative")
        estimates.append({"h": estimate.to_json(), "h1": comparison.to_json()})
        rows.append([point[0], point[1], estimate.value, estimate.stat_error, estimate.censored_fraction,
                     comparison.value, estimate.value / comparison.value])

    residuals = []
    if parameters["residual_points"] is not None:
        for k, point in enumerate(points_parameter(parameters, "residual_points")):
            residual = h2d_harmonicity_residual(dist, point, parameters["horizon"], parameters["residual_paths"],
                                                derived_seed(config.seed, StreamPurpose.HARMONIC_FIRST_STEP, k),
                                                parameters["block_size"], context.workers)
            residuals.append(residual.to_json())
            if not residual.within_four_sigma:
                violations.append("harmonicity residual " + str(residual.residual) + " at " + str(list(point))
                                  + " exceeds 4 sigma = " + str(4 * residual.sigma))

    report = {"mode": "h2d", "estimates": estimates, "harmonicity_residuals": residuals}
    summary = ", ".join("h(" + ("%g, %g" % (r[0], r[1])) + ") = " + ("%.6g" % r[2]) for r in rows)
    return ExperimentOutcome(["x1", "x2", "h", "stat_error", "censored_fraction", "h1_x1", "ratio"], rows, report,
                             violations, summary)


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    mode = config.parameters["mode"]
    if mode == "h1":
        return _run_h1(config, context)
    if mode == "h2d":
        return _run_h2d(config, context)
    raise ConfigError("unknown mode " + mode + ". Known modes: " + str(MODES), "parameters.mode")


def register_harmonic_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Harmonic functions of the walk killed on leaving the half-line or the quadrant",
        law_requirement=LawRequirement.ANY,
        default_parameters={
            "mode": "h1",
            "coordinate": 1,
            "x_values": [1.0, 2.0, 5.0, 10.0],
            "points": [[1.0, 1.0], [2.0, 1.0], [1.0, 2.0], [5.0, 5.0]],
            "method": "auto",
            "L": 10000,
            "horizon": 10000,
            "paths": 100000,
            "block_size": DEFAULT_BLOCK_SIZE,
            "residual_range": 500,
            "residual_tolerance": 1e-10,
            "residual_points": None,
            "residual_paths": 20000,
            "ladder_samples": 0,
            "ladder_m": 5.0,
            "ladder_ts": [1.0, 2.0, 5.0, 10.0]
        },
        run=_run))
