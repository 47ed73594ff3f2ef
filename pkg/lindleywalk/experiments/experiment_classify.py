from lindleywalk.config_file import DistributionJson, ExperimentConfig
from lindleywalk.core.classification import classify_regime
from lindleywalk.core.common import ConfigError, DEFAULT_DELTA, ExperimentId, Verdict
from lindleywalk.core.decorrelation import decorrelate
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.moments import check_assumptions, moments

EXPERIMENT_ID = ExperimentId.CLASSIFY


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    dist = config.law_distribution()
    parameters = config.parameters
    report = moments(dist)
    assumptions = check_assumptions(dist)
    classification = classify_regime(report, parameters["delta"], assumptions)

    results = {
        "law": DistributionJson.serialize(dist),
        "assumptions": assumptions.to_json(),
        "moments": report.to_json(),
        "classification": classification.to_json()
    }
    if report.rho is not None and abs(report.rho) < 1:
        results["decorrelation"] = decorrelate(report.covariance).to_json()

    violations = []
    expected = parameters["expected_verdict"]
    if expected is not None:
        if expected not in Verdict.__members__:
            raise ConfigError("unknown verdict " + expected + ". Known verdicts: " + str(list(Verdict.__members__)),
                              "parameters.expected_verdict")
        if classification.verdict != Verdict[expected]:
            violations.append("verdict " + classification.verdict.name + ", expected " + expected)

    rows = [[h.name, h.passed] for h in classification.hypotheses_met]
    summary = "case " + classification.case_label.name + ", " + classification.verdict.name
    if classification.tail_exponent is not None:
        summary += ", tail exponent " + str(classification.tail_exponent)
    return ExperimentOutcome(["hypothesis", "passed"], rows, results, violations, summary)


def register_classify_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Classify the regime of the reflected walk and predict the exit-time tail exponent",
        law_requirement=LawRequirement.DISTRIBUTION,
        default_parameters={
            "delta": DEFAULT_DELTA,
            "expected_verdict": None
        },
        run=_run))
