from lindleywalk.config_file import ExperimentConfig, point_parameter
from lindleywalk.core.classification import classify_regime
from lindleywalk.core.common import DEFAULT_BLOCK_SIZE, DEFAULT_DELTA, ExperimentId
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.moments import check_assumptions, moments
from lindleywalk.core.occupation import occupation_series

EXPERIMENT_ID = ExperimentId.OCCUPATION


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    dist = config.law_distribution()
    parameters = config.parameters
    box = point_parameter(parameters, "box")
    classification = classify_regime(moments(dist), parameters["delta"], check_assumptions(dist))
    series = occupation_series(dist, box, parameters["n_max"], parameters["paths"], config.seed,
                               parameters["block_size"], context.workers)
    disagreements = series.disagreements()
    violations = ["box and survival terms disagree at n=" + str(n) + ": " + str(series.box_terms[n]) + " vs "
                  + str(series.survival_terms[n]) for n in disagreements]
    report = {
        "classification": classification.to_json(),
        "box": list(box),
        "n_max": parameters["n_max"],
        "paths": parameters["paths"],
        "box_partial_sum": float(series.box_partial_sums[-1]),
        "survival_partial_sum": float(series.survival_partial_sums[-1]),
        "origin_partial_sum": float(series.origin_partial_sums[-1]),
        "tail_term": series.tail_term,
        "decade_growth": series.decade_growth(),
        "disagreements": disagreements
    }
    summary = classification.verdict.name + ", partial sum " + ("%.6g" % series.box_partial_sums[-1]) \
              + ", last term " + ("%.3g" % series.tail_term) + ", last-decade growth " \
              + ("%.3g" % series.decade_growth())
    header = ["n", "box_term", "box_partial_sum", "survival_term", "survival_partial_sum", "origin_term",
              "origin_partial_sum"]
    return ExperimentOutcome(header, [list(row) for row in series.rows()], report, violations, summary)


def register_occupation_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Expected occupation of a box by the Lindley process from the origin, two ways",
        law_requirement=LawRequirement.DISTRIBUTION,
        default_parameters={
            "delta": DEFAULT_DELTA,
            "box": [1.0, 1.0],
            "n_max": 2000,
            "paths": 20000,
            "block_size": DEFAULT_BLOCK_SIZE
        },
        run=_run))
