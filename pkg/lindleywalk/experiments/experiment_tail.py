import logging
import math

from lindleywalk.config_file import ExperimentConfig, expand_n_grid, interval_parameter, point_parameter
from lindleywalk.core.classification import classify_regime
from lindleywalk.core.common import CaseLabel, DEFAULT_BLOCK_SIZE, DEFAULT_DELTA, ExperimentId, \
    StreamPurpose
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.harmonic import h2d_estimate, oriented_case_d
from lindleywalk.core.moments import check_assumptions, moments
from lindleywalk.core.survival import decay_check, doney_kappa, flat_tail_check, survival_curve
from lindleywalk.core.tail_fit import default_window, fit_prefactor, fit_tail_exponent

logger = logging.getLogger(__name__)

EXPERIMENT_ID = ExperimentId.TAIL

# case (a) curves are checked against n^-r with r capped here
MAX_DECAY_CHECK_ORDER = 2.0


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    dist = config.law_distribution()
    parameters = config.parameters
    start = point_parameter(parameters, "start")
    n_grid = expand_n_grid(parameters["n_grid"])
    window = interval_parameter(parameters, "fit_window")
    if window is not None:
        window = (int(window[0]), int(window[1]))
    expected_exponent = interval_parameter(parameters, "expected_exponent")

    classification = classify_regime(moments(dist), parameters["delta"], check_assumptions(dist))
    logger.info("regime %s, %s", classification.case_label.name, classification.verdict.name)

    curve = survival_curve(dist, start, n_grid, parameters["paths"], config.seed, parameters["block_size"],
                           context.workers, parameters["censor_horizon"])
    results = {"classification": classification.to_json(), "curve": curve.to_json()}
    violations = []
    summary = "case " + classification.case_label.name

    case = classification.case_label
    if case in [CaseLabel.C_CENTERED, CaseLabel.D_MIXED, CaseLabel.UNKNOWN]:
        fit = fit_tail_exponent(curve, window)
        results["fit"] = fit.to_json()
        summary += ", fitted exponent " + ("%.4f" % fit.exponent) + " +- " + ("%.4f" % fit.stderr)
        if classification.tail_exponent is not None:
            results["predicted_exponent"] = classification.tail_exponent
            summary += " (predicted " + ("%.4f" % classification.tail_exponent) + ")"
        if expected_exponent is not None and not expected_exponent[0] <= fit.exponent <= expected_exponent[1]:
            violations.append("fitted exponent " + str(fit.exponent) + " outside " + str(list(expected_exponent)))
    if case == CaseLabel.D_MIXED:
        prefactor = _case_d_prefactor(config, context, curve, start, window)
        results["prefactor"] = prefactor
        if not prefactor["within_tolerance"]:
            violations.append("fitted prefactor " + str(prefactor["fit"]["prefactor"]) + " differs from kappa h = "
                              + str(prefactor["predicted"]) + " by more than "
                              + str(config.parameters["prefactor_tolerance"]))
    elif case == CaseLabel.A_NEGATIVE_DRIFT:
        order = classification.decay_order if classification.decay_order is not None else 1.0
        check = decay_check(curve, min(order, MAX_DECAY_CHECK_ORDER), window or default_window(curve))
        results["decay_check"] = {"r": check.r, "constant": check.constant, "worst_ratio": check.worst_ratio,
                                  "passed": check.passed}
        if not check.passed:
            violations.append("survival curve not below c n^-" + str(check.r) + ", worst ratio "
                              + str(check.worst_ratio))
    elif case == CaseLabel.B_POSITIVE_DRIFT:
        n_end = curve.n_grid[-1]
        n_ref = min(curve.n_grid, key=lambda n: abs(n - n_end / 10))
        check = flat_tail_check(curve, n_ref, n_end)
        results["flat_tail_check"] = {"n_ref": n_ref, "n_end": n_end, "reference": check.reference,
                                      "reference_ci": list(check.reference_ci), "end": check.end,
                                      "passed": check.passed}
        summary += ", P[tau > " + str(n_end) + "] = " + str(check.end)
        if not check.passed:
            violations.append("survival at n=" + str(n_end) + " is " + str(check.end)
                              + ", outside the interval " + str(list(check.reference_ci)) + " at n=" + str(n_ref))

    return ExperimentOutcome(["n", "estimate", "ci_low", "ci_high"], [list(row) for row in curve.rows()], results,
                             violations, summary)


# Fitted c in P[τ > n] ~ c n^-1/2 against κ h(x), κ taken from the centered coordinate
def _case_d_prefactor(config: ExperimentConfig, context: RunContext, curve, start, window):
    parameters = config.parameters
    fitted = fit_prefactor(curve, 0.5, window)
    oriented, _, _ = oriented_case_d(config.law_distribution(), start)
    kappa = doney_kappa(oriented.marginal(0).variance())
    h = h2d_estimate(config.law_distribution(), start, curve.n_grid[-1], parameters["harmonic_paths"], config.seed,
                     parameters["block_size"], context.workers, purpose=StreamPurpose.HARMONIC_FIRST_STEP)
    predicted = kappa * h.value
    relative_difference = (fitted.prefactor - predicted) / predicted if predicted > 0 else math.nan
    if abs(relative_difference) > parameters["prefactor_tolerance"]:
        logger.warning("fitted prefactor %s differs from kappa h = %s by %.1f%%", fitted.prefactor, predicted,
                       100 * relative_difference)
    return {
        "fit": fitted.to_json(),
        "kappa": kappa,
        "h": h.to_json(),
        "predicted": predicted,
        "relative_difference": relative_difference,
        "within_tolerance": abs(relative_difference) <= parameters["prefactor_tolerance"]
    }


def register_tail_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Survival curve of the exit time from the quadrant and its fitted tail exponent",
        law_requirement=LawRequirement.DISTRIBUTION,
        default_parameters={
            "delta": DEFAULT_DELTA,
            "start": [1.0, 1.0],
            "n_grid": {"geometric": {"min": 1, "max": 10000, "per_decade": 10}},
            "paths": 100000,
            "block_size": DEFAULT_BLOCK_SIZE,
            "censor_horizon": None,
            "fit_window": None,
            "expected_exponent": None,
            "harmonic_paths": 100000,
            "prefactor_tolerance": 0.15
        },
        run=_run))
