from lindleywalk.config_file import ExperimentConfig
from lindleywalk.core.common import ConfigError, ExperimentId
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.survival import doney_check

EXPERIMENT_ID = ExperimentId.DONEY


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    parameters = config.parameters
    marginal = config.law_marginal()
    n_list = parameters["n_list"]
    if not n_list or any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in n_list):
        raise ConfigError("expected a non-empty list of positive integers", "parameters.n_list")
    x = float(parameters["x"])
    if not x > 0:
        raise ConfigError("x must be > 0", "parameters.x")
    table = doney_check(marginal, x, n_list, parameters["paths"], config.seed, parameters["L"], context.workers)

    violations = []
    last = table.rows[-1]
    if abs(last.ratio - 1) > parameters["ratio_tolerance"]:
        violations.append("sqrt(n) P[tau > n] / (kappa h1) = " + str(last.ratio) + " at n=" + str(last.n))
    if table.method == "exact_lattice" and not table.monotone_approach:
        violations.append("ratio does not approach 1 monotonically")

    report = {"x": table.x, "kappa": table.kappa, "h1": table.h1, "method": table.method,
              "monotone_approach": table.monotone_approach}
    rows = [[row.n, row.tail, row.scaled_tail, row.kappa_h1, row.ratio] for row in table.rows]
    summary = "kappa h1(" + str(x) + ") = " + ("%.6g" % (table.kappa * table.h1)) + ", ratio at n=" + str(last.n) \
              + " is " + ("%.6g" % last.ratio)
    return ExperimentOutcome(["n", "tail", "sqrt_n_tail", "kappa_h1", "ratio"], rows, report, violations, summary)


def register_doney_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="sqrt(n) P[tau > n] against kappa h1(x) for the centered walk on the half-line",
        law_requirement=LawRequirement.MARGINAL_OR_COORDINATE,
        default_parameters={
            "coordinate": 1,
            "x": 1.0,
            "n_list": [100, 1000, 10000],
            "paths": 100000,
            "L": 10000,
            "ratio_tolerance": 0.01
        },
        run=_run))
