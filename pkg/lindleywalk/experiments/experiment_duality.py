import logging
import os

import numpy as np

from lindleywalk.config_file import ExperimentConfig
from lindleywalk.core.common import ExperimentId, StreamPurpose
from lindleywalk.core.experiment_data import ExperimentData, ExperimentOutcome, LawRequirement, RunContext, \
    register_experiment_data
from lindleywalk.core.math import relative_deviation
from lindleywalk.core.random_streams import block_layout, block_stream, derived_seed, single_stream
from lindleywalk.core.walk import contraction_check, dual_waiting_times_batch, lindley_paths_batch, \
    write_trajectory_csv

logger = logging.getLogger(__name__)

EXPERIMENT_ID = ExperimentId.DUALITY

TRIALS_PER_CHUNK = 1000
TRAJECTORY_FILE_NAME = "trajectory.csv"


def _run(config: ExperimentConfig, context: RunContext) -> ExperimentOutcome:
    dist = config.law_distribution()
    parameters = config.parameters
    length = parameters["length"]
    lattice = dist.is_integer_lattice()
    # sums of integers are exact in floating point, so lattice laws must agree to the last bit
    tolerance = 0.0 if lattice else parameters["relative_tolerance"]

    rows = []
    violations = []
    worst = 0.0
    for chunk_index, count in block_layout(parameters["trials"], TRIALS_PER_CHUNK):
        stream = block_stream(config.seed, StreamPurpose.DUALITY_TRIALS, chunk_index)
        increments = dist.sample_points(stream, count * length).reshape(count, length, 2)
        recursion = lindley_paths_batch(increments, np.zeros(2))
        unrolled = dual_waiting_times_batch(increments)
        absolute = float(np.max(np.abs(recursion - unrolled)))
        relative = float(np.max(relative_deviation(recursion, unrolled)))
        worst = max(worst, relative)
        rows.append([chunk_index, count, absolute, relative])
        if relative > tolerance:
            trial, step, coordinate = np.unravel_index(np.argmax(relative_deviation(recursion, unrolled)),
                                                       recursion.shape)
            violations.append("chunk " + str(chunk_index) + " trial " + str(trial) + " n=" + str(step)
                              + " coordinate " + str(coordinate + 1) + ": relative deviation " + str(relative))

    contraction_failures = 0
    for k in range(parameters["contraction_checks"]):
        stream = block_stream(derived_seed(config.seed, StreamPurpose.SINGLE_PATH, k), StreamPurpose.DUALITY_TRIALS, 0)
        x, y = stream.uniform(0, 10, 2), stream.uniform(0, 10, 2)
        if not contraction_check(dist, tuple(x), tuple(y), length, stream).non_increasing:
            contraction_failures += 1
    if contraction_failures:
        violations.append(str(contraction_failures) + " Lindley paths from different starts moved apart")

    if parameters["trajectory_length"] > 0 and context.out_dir is not None:
        stream = single_stream(config.seed)
        os.makedirs(context.out_dir, exist_ok=True)
        write_trajectory_csv(os.path.join(context.out_dir, TRAJECTORY_FILE_NAME),
                             dist.sample_points(stream, parameters["trajectory_length"]), (0.0, 0.0), (0.0, 0.0))

    report = {
        "trials": parameters["trials"],
        "length": length,
        "lattice": lattice,
        "tolerance": tolerance,
        "max_relative_deviation": worst,
        "contraction_checks": parameters["contraction_checks"],
        "contraction_failures": contraction_failures,
        "passed": not violations
    }
    summary = ("pass" if not violations else "fail") + ", max relative deviation " + str(worst)
    return ExperimentOutcome(["chunk", "trials", "max_abs_deviation", "max_relative_deviation"], rows, report,
                             violations, summary)


def register_duality_experiment():
    register_experiment_data(EXPERIMENT_ID, ExperimentData(
        description="Lindley recursion from the origin against its unrolled running-maximum form",
        law_requirement=LawRequirement.DISTRIBUTION,
        default_parameters={
            "trials": 10000,
            "length": 200,
            "relative_tolerance": 1e-9,
            "contraction_checks": 20,
            "trajectory_length": 0
        },
        run=_run))
