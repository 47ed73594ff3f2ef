import math

from lindleywalk.config_file import ExperimentConfig, point_parameter
from lindleywalk.core.common import ConfigError, DEFAULT_BLOCK_SIZE, ExperimentId
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.path_batches import reflection_comparison

EXPERIMENT_ID = ExperimentId.REFLECTION

CONTINUOUS_RELATIVE_TOLERANCE = 1e-9


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    dist = config.law_distribution()
    parameters = config.parameters
    start = point_parameter(parameters, "start")
    if start[0] < 0 or start[1] < 0:
        raise ConfigError("start must lie in the closed quadrant", "parameters.start")
    delta = parameters["reflection_delta"]
    if delta is None and any(math.isinf(dist.marginal(i).support_bounds()[1]) for i in range(2)):
        raise ConfigError("increments are unbounded above, so reflection_delta must be given",
                          "parameters.reflection_delta")
    tolerance = parameters["comparison_tolerance"]
    if tolerance is None:
        tolerance = 0.0 if dist.is_integer_lattice() else CONTINUOUS_RELATIVE_TOLERANCE

    report = reflection_comparison(dist, delta, parameters["paths"], parameters["length"], config.seed,
                                   parameters["block_size"], context.workers, start, tolerance)
    violations = ["R" + str(v.coordinate + 1) + "(" + str(v.step) + ") = " + str(v.reflected) + " > W + delta = "
                  + str(v.lindley + report.delta) + " on path seed (" + str(v.master_seed) + ", block "
                  + str(v.block_index) + ", row " + str(v.row) + ")" for v in report.violations]
    for violation in violations:
        print(violation)
    rows = [[v.master_seed, v.block_index, v.row, v.step, v.coordinate + 1, v.reflected, v.lindley]
            for v in report.violations]
    summary = "delta " + str(report.delta) + ", " + str(len(report.violations)) + " violations over " \
              + str(report.paths) + " paths, X <= delta " + str(report.increments_bounded_above) \
              + ", X >= -delta " + str(report.increments_bounded_below)
    return ExperimentOutcome(["master_seed", "block", "row", "step", "coordinate", "reflected", "lindley"], rows,
                             report.to_json(), violations, summary)


def register_reflection_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Reflected walk R against the Lindley process W plus delta on shared paths",
        law_requirement=LawRequirement.DISTRIBUTION,
        default_parameters={
            "start": [0.0, 0.0],
            "reflection_delta": None,
            "paths": 10000,
            "length": 1000,
            "block_size": DEFAULT_BLOCK_SIZE,
            "comparison_tolerance": None
        },
        run=_run))
