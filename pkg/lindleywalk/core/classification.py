import math
from typing import List, Optional

from lindleywalk.core.common import CaseLabel, DEFAULT_DELTA, DriftSign, Verdict
from lindleywalk.core.moments import AssumptionReport, MomentReport


def predicted_exponent(rho: float) -> float:
    if not -1 < rho < 1:
        raise ValueError("correlation must be in (-1, 1), got " + str(rho))
    return math.pi / (2 * math.acos(-rho))


def required_moment_order(rho: float, delta: float) -> float:
    if not -1 < rho < 1:
        raise ValueError("correlation must be in (-1, 1), got " + str(rho))
    if not delta > 0:
        raise ValueError("delta must be > 0, got " + str(delta))
    return max(2 + delta, math.pi / math.acos(-rho))


def drift_sign(report: MomentReport, i: int) -> DriftSign:
    positive = report.positive_part_mean[i]
    negative = report.negative_part_mean[i]
    if math.isinf(positive) and math.isinf(negative):
        return DriftSign.UNDEFINED
    if report.is_centered(i):
        return DriftSign.CENTERED
    if positive < negative:
        return DriftSign.NEGATIVE
    return DriftSign.POSITIVE


class Hypothesis:
    def __init__(self, name: str, passed: bool):
        self.name = name
        self.passed = passed

    def to_json(self):
        return {"name": self.name, "passed": self.passed}


class RegimeClassification:
    def __init__(self, case_label: CaseLabel, verdict: Verdict, tail_exponent: Optional[float],
                 required_moment_order: Optional[float], hypotheses_met: List[Hypothesis],
                 drift_signs: List[DriftSign], reason: Optional[str] = None, decay_order: Optional[float] = None):
        self.case_label = case_label
        self.verdict = verdict
        self.tail_exponent = tail_exponent
        self.required_moment_order = required_moment_order
        self.hypotheses_met = hypotheses_met
        self.drift_signs = drift_signs
        self.reason = reason
        # case (a): P[τ > n] = o(n^-r) for every r >= 1 below this order
        self.decay_order = decay_order

    def failing_checks(self) -> List[str]:
        return [h.name for h in self.hypotheses_met if not h.passed]

    def to_json(self):
        return {
            "case": self.case_label.name,
            "verdict": self.verdict.name,
            "tail_exponent": self.tail_exponent,
            "required_moment_order": self.required_moment_order,
            "hypotheses": [h.to_json() for h in self.hypotheses_met],
            "drift_signs": [s.name for s in self.drift_signs],
            "reason": self.reason,
            "decay_order": None if self.decay_order is None or math.isinf(self.decay_order) else self.decay_order,
            "decay_all_orders": self.decay_order is not None and math.isinf(self.decay_order)
        }


def _unknown(reason: str, hypotheses: List[Hypothesis], signs: List[DriftSign]) -> RegimeClassification:
    return RegimeClassification(CaseLabel.UNKNOWN, Verdict.UNKNOWN, None, None, hypotheses, signs, reason)


def _moment_hypothesis(report: MomentReport, i: int, r: float) -> Hypothesis:
    return Hypothesis("E|X" + str(i + 1) + "|^" + _format_order(r) + " < inf", report.moment_order(i, r))


def _format_order(r: float) -> str:
    return ("%.6g" % r)


def classify_regime(report: MomentReport, delta: float = DEFAULT_DELTA,
                    assumptions: Optional[AssumptionReport] = None) -> RegimeClassification:
    if not delta > 0:
        raise ValueError("delta must be > 0, got " + str(delta))
    signs = [drift_sign(report, 0), drift_sign(report, 1)]
    hypotheses = []
    if assumptions is not None:
        hypotheses.append(Hypothesis("support not contained in a line", assumptions.not_on_line))
        hypotheses.append(Hypothesis("P[X in open quadrant] > 0", assumptions.hits_open_quadrant))
        if not assumptions.passed:
            return _unknown("standing assumptions fail: " + ", ".join(assumptions.failures()), hypotheses, signs)

    negative = [i for i in range(2) if signs[i] == DriftSign.NEGATIVE]
    if negative:
        i = negative[0]
        hypotheses.append(Hypothesis("E X" + str(i + 1) + "+ < E X" + str(i + 1) + "-", True))
        # o(n^-r) needs E((Xᵢ⁺)^r) < inf with r >= 1
        decay_order = report.positive_thresholds[i] if report.positive_thresholds[i] > 1 else None
        return RegimeClassification(CaseLabel.A_NEGATIVE_DRIFT, Verdict.TRANSIENT, None, None, hypotheses, signs,
                                    decay_order=decay_order)

    if DriftSign.UNDEFINED in signs:
        return _unknown("a coordinate has E X+ = E X- = inf", hypotheses, signs)

    if signs == [DriftSign.POSITIVE, DriftSign.POSITIVE]:
        checks = [Hypothesis("E X" + str(i + 1) + "+ < inf", report.pos_moment_order(i, 1)) for i in range(2)]
        hypotheses.extend(checks)
        if not all(h.passed for h in checks):
            return _unknown("positive parts not integrable", hypotheses, signs)
        return RegimeClassification(CaseLabel.B_POSITIVE_DRIFT, Verdict.POSITIVE_RECURRENT, None, None, hypotheses,
                                    signs)

    if signs == [DriftSign.CENTERED, DriftSign.CENTERED]:
        return _classify_centered(report, delta, hypotheses, signs)

    return _classify_mixed(report, delta, hypotheses, signs)


def _classify_centered(report: MomentReport, delta: float, hypotheses: List[Hypothesis],
                       signs: List[DriftSign]) -> RegimeClassification:
    rho = report.rho
    hypotheses.append(Hypothesis("correlation defined", rho is not None))
    if rho is None:
        return _unknown("correlation undefined: " + str(report.rho_reason), hypotheses, signs)
    hypotheses.append(Hypothesis("|rho| < 1", abs(rho) < 1))
    if not abs(rho) < 1:
        return _unknown("correlation on the boundary |rho| = 1", hypotheses, signs)
    order = required_moment_order(rho, delta)
    checks = [_moment_hypothesis(report, i, order) for i in range(2)]
    hypotheses.extend(checks)
    if not all(h.passed for h in checks):
        return _unknown("moment hypothesis fails: " + ", ".join(h.name for h in checks if not h.passed),
                        hypotheses, signs)
    verdict = Verdict.NULL_RECURRENT if rho >= 0 else Verdict.TRANSIENT
    return RegimeClassification(CaseLabel.C_CENTERED, verdict, predicted_exponent(rho), order, hypotheses, signs)


def _classify_mixed(report: MomentReport, delta: float, hypotheses: List[Hypothesis],
                    signs: List[DriftSign]) -> RegimeClassification:
    centered = signs.index(DriftSign.CENTERED)
    drifting = 1 - centered
    checks = [
        _moment_hypothesis(report, centered, 2 + delta),
        _moment_hypothesis(report, drifting, 2 + delta),
        Hypothesis("E(X" + str(drifting + 1) + "-)^" + _format_order(3 + delta) + " < inf",
                   report.neg_moment_order(drifting, 3 + delta)),
    ]
    hypotheses.extend(checks)
    if not all(h.passed for h in checks):
        return _unknown("moment hypothesis fails: " + ", ".join(h.name for h in checks if not h.passed),
                        hypotheses, signs)
    return RegimeClassification(CaseLabel.D_MIXED, Verdict.NULL_RECURRENT, 0.5, 3 + delta, hypotheses, signs)
