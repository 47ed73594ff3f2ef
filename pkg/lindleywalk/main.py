import logging
from typing import Optional

from lindleywalk.config_file import ExperimentConfig, load_experiment_config_from_json_file
from lindleywalk.core.common import EXIT_STATUS_BY_RUN_STATUS, ExperimentId, LindleyWalkError, RunStatus
from lindleywalk.core.experiment_data import ExperimentOutcome, RunContext, get_experiment_data
from lindleywalk.register_experiments import register_all_experiments
from lindleywalk.result_file import write_artifacts

logger = logging.getLogger(__name__)


class RunResult:
    def __init__(self, status: RunStatus, config: Optional[ExperimentConfig], outcome: Optional[ExperimentOutcome],
                 error: Optional[Exception]):
        self.status = status
        self.config = config
        self.outcome = outcome
        self.error = error

    @property
    def exit_status(self) -> int:
        return EXIT_STATUS_BY_RUN_STATUS[self.status]


def run_experiment(experiment_id: ExperimentId, config_path: str, out_dir: Optional[str], workers: int = 1,
                   seed: Optional[int] = None) -> RunResult:
    """Resolves the config, runs one experiment and writes config.json, results.csv and report.json to out_dir."""
    register_all_experiments()
    config = None
    try:
        config = load_experiment_config_from_json_file(config_path, experiment_id, seed)
        data = get_experiment_data(experiment_id)
        logger.info("running %s (%s) with seed %s", experiment_id.name.lower(), config.name, config.seed)
        outcome = data.run(config, RunContext(workers, out_dir))
    except (LindleyWalkError, ValueError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        if out_dir is not None:
            write_artifacts(out_dir, RunStatus.ERROR, config, None, None, {}, [], e)
        return RunResult(RunStatus.ERROR, config, None, e)

    status = RunStatus.FAIL if outcome.violations else RunStatus.OK
    for violation in outcome.violations:
        logger.warning("violation: %s", violation)
    if out_dir is not None:
        write_artifacts(out_dir, status, config, outcome.header, outcome.rows, outcome.report, outcome.violations)
    return RunResult(status, config, outcome, None)
