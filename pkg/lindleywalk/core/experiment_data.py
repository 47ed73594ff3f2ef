from typing import Any, Callable, Dict, List, Optional

from lindleywalk.core.common import ExperimentId


class LawRequirement:
    DISTRIBUTION = "distribution"
    MARGINAL = "marginal"
    # a marginal, or a distribution plus a coordinate parameter
    MARGINAL_OR_COORDINATE = "marginal_or_coordinate"
    # depends on the mode parameter
    ANY = "any"


class RunContext:
    def __init__(self, workers: int, out_dir: Optional[str]):
        self.workers = workers
        self.out_dir = out_dir


class ExperimentOutcome:
    def __init__(self, header: List[str], rows: List[List[Any]], report: Dict[str, Any], violations: List[Any],
                 summary: str = ""):
        self.header = header
        self.rows = rows
        self.report = report
        self.violations = violations
        # one line for the console
        self.summary = summary


class ExperimentData:
    def __init__(self, description: str, law_requirement: str, default_parameters: Dict[str, Any],
                 run: Callable[[Any, RunContext], ExperimentOutcome]):
        self.description = description
        self.law_requirement = law_requirement
        # config files override these; the resolved set is what gets written back
        self.default_parameters = default_parameters
        self.run = run


EXPERIMENTS: Dict[ExperimentId, ExperimentData] = {}

# parameters shared by every experiment
COMMON_PARAMETERS: Dict[str, Any] = {"seed": 0}


def register_experiment_data(experiment_id: ExperimentId, data: ExperimentData):
    EXPERIMENTS[experiment_id] = data


def get_experiment_data(experiment_id: ExperimentId) -> ExperimentData:
    if experiment_id not in EXPERIMENTS:
        raise Exception("No experiment registered for " + str(experiment_id) + "! Known experiments: "
                        + str([e.name for e in EXPERIMENTS.keys()]))
    return EXPERIMENTS[experiment_id]


def experiment_id_from_name(name: str) -> ExperimentId:
    try:
        return ExperimentId[name.upper()]
    except KeyError:
        raise ValueError("Unknown experiment '" + name + "'. Known experiments: "
                         + str([e.name.lower() for e in ExperimentId]))


def all_parameter_names() -> set:
    names = set(COMMON_PARAMETERS.keys())
    for data in EXPERIMENTS.values():
        names.update(data.default_parameters.keys())
    return names
