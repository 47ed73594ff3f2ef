from typing import List

import numpy as np

from lindleywalk.config_file import ExperimentConfig, numbers_parameter
from lindleywalk.core.common import ConfigError, Exactness, ExperimentId, StreamPurpose
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.lyapunov import lyapunov_build, lyapunov_dominance_check, monotonicity_violations, \
    superharmonic_check
from lindleywalk.core.random_streams import derived_seed

EXPERIMENT_ID = ExperimentId.LYAPUNOV


def grid_from_parameter(value) -> List[float]:
    path = "parameters.grid"
    if not isinstance(value, dict) or set(value.keys()) != {"start", "stop", "step"}:
        raise ConfigError("expected {\"start\": .., \"stop\": .., \"step\": ..}", path)
    start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
    if start < 0 or stop <= start or step <= 0:
        raise ConfigError("expected 0 <= start < stop and step > 0", path)
    count = int(round((stop - start) / step)) + 1
    # rounding keeps grid points such as 0.3 exact in the table
    return [float(x) for x in np.round(start + step * np.arange(count), 12)]


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    parameters = config.parameters
    marginal = config.law_marginal()
    grid = grid_from_parameter(parameters["grid"])
    spec = lyapunov_build(marginal)
    superharmonic = superharmonic_check(spec, marginal, grid, parameters["tolerance"])
    violations = ["drift " + str(d) + " > tolerance at x=" + str(x) for x, d in superharmonic.violations()]
    exactness, error_bound = marginal.exactness()
    shape_tolerance = 1e-12 if exactness == Exactness.EXACT else 100 * error_bound
    violations.extend(monotonicity_violations(spec, grid, shape_tolerance))

    ratio_points = numbers_parameter(parameters, "ratio_points")
    if any(x <= 0 for x in ratio_points):
        raise ConfigError("ratio points must be > 0", "parameters.ratio_points")
    ratios = [spec.m(x) / x for x in ratio_points]
    ratios_decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    if not ratios_decreasing:
        violations.append("m(x)/x is not strictly decreasing on " + str(ratio_points))

    dominance = []
    for k, x in enumerate(parameters["dominance_points"]):
        check = lyapunov_dominance_check(spec, marginal, float(x), parameters["dominance_n"],
                                         parameters["dominance_paths"],
                                         derived_seed(config.seed, StreamPurpose.LYAPUNOV_DOMINANCE, k))
        dominance.append({"x": x, "V": check.bound, "estimate": check.estimate, "stat_error": check.stat_error,
                          "passed": check.passed})
        if not check.passed:
            violations.append("E[x + S(n) ; tau > n] = " + str(check.estimate) + " above V(" + str(x) + ") = "
                              + str(check.bound))

    report = {
        "constants": spec.to_json(),
        "superharmonic": superharmonic.to_json(),
        "m_over_x": [{"x": x, "ratio": r} for x, r in zip(ratio_points, ratios)],
        "m_over_x_decreasing": ratios_decreasing,
        "dominance": dominance
    }
    summary = "A=" + ("%.10g" % spec.A) + " x0=" + ("%.10g" % spec.x0) + " R=" + ("%.10g" % spec.R) \
              + ", max drift " + ("%.3g" % superharmonic.max_drift) + " at x=" + str(superharmonic.argmax)
    return ExperimentOutcome(["x", "a", "b", "m", "a_bar", "V", "drift"], [list(row) for row in spec.table(grid)],
                             report, violations, summary)


def register_lyapunov_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Lyapunov function of the centered walk on the half-line and its superharmonicity",
        law_requirement=LawRequirement.MARGINAL_OR_COORDINATE,
        default_parameters={
            "coordinate": 1,
            "grid": {"start": 0.0, "stop": 10.0, "step": 0.01},
            "tolerance": None,
            "ratio_points": [10.0, 100.0, 1000.0],
            "dominance_points": [],
            "dominance_n": 100,
            "dominance_paths": 100000
        },
        run=_run))
