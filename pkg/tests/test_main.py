import json
import os
import subprocess
import sys

import pytest

from lindleywalk import main
from lindleywalk.core.common import ConfigError, ExperimentId, RegimeMismatchError, RunStatus
from lindleywalk.result_file import CONFIG_FILE_NAME, REPORT_FILE_NAME, RESULTS_FILE_NAME

REPO_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PLUS_MINUS_ONE = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, "0.5"], [-1, "0.5"]]}
INDEPENDENT_WALKS = {"kind": "PRODUCT", "first": PLUS_MINUS_ONE, "second": PLUS_MINUS_ONE}


def _classify_document(expected_verdict):
    return {"schema_version": 1, "experiment": "classify", "distribution": INDEPENDENT_WALKS,
            "parameters": {"seed": 1, "expected_verdict": expected_verdict}}


def _read_report(out_dir):
    with open(os.path.join(out_dir, REPORT_FILE_NAME)) as report_file:
        return json.load(report_file)


def test_classify_ok(write_config, tmp_path):
    out_dir = str(tmp_path / "out")
    result = main.run_experiment(ExperimentId.CLASSIFY, write_config(_classify_document("NULL_RECURRENT")), out_dir)
    assert result.status == RunStatus.OK
    assert result.exit_status == 0
    for file_name in [CONFIG_FILE_NAME, RESULTS_FILE_NAME, REPORT_FILE_NAME]:
        assert os.path.isfile(os.path.join(out_dir, file_name))
    report = _read_report(out_dir)
    assert report["status"] == "ok"
    assert report["results"]["classification"]["case"] == "C_CENTERED"


def test_wrong_expectation_fails(write_config, tmp_path):
    out_dir = str(tmp_path / "out")
    result = main.run_experiment(ExperimentId.CLASSIFY, write_config(_classify_document("TRANSIENT")), out_dir)
    assert result.status == RunStatus.FAIL
    assert result.exit_status == 1
    assert _read_report(out_dir)["violations"]


def test_malformed_config_is_an_error(write_config, tmp_path):
    out_dir = str(tmp_path / "out")
    result = main.run_experiment(ExperimentId.CLASSIFY, write_config('{"schema_version": 1,'), out_dir)
    assert result.status == RunStatus.ERROR
    assert result.exit_status == 2
    assert isinstance(result.error, ConfigError)
    assert _read_report(out_dir)["error"]["type"] == "ConfigError"
    assert not os.path.exists(os.path.join(out_dir, CONFIG_FILE_NAME))


def test_missing_config_file_is_an_error(tmp_path):
    result = main.run_experiment(ExperimentId.CLASSIFY, str(tmp_path / "missing.json"), None)
    assert result.exit_status == 2


def test_regime_mismatch_is_an_error(write_config, tmp_path):
    drifted = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, "0.75"], [-1, "0.25"]]}
    document = {"schema_version": 1, "marginal": drifted, "parameters": {"seed": 3}}
    out_dir = str(tmp_path / "out")
    result = main.run_experiment(ExperimentId.LYAPUNOV, write_config(document), out_dir)
    assert result.exit_status == 2
    assert isinstance(result.error, RegimeMismatchError)
    assert os.path.isfile(os.path.join(out_dir, CONFIG_FILE_NAME))


def test_reruns_give_identical_results(write_config, tmp_path):
    document = {"schema_version": 1, "experiment": "duality", "distribution": INDEPENDENT_WALKS,
                "parameters": {"seed": 17, "trials": 1500, "length": 40, "contraction_checks": 2}}
    config_path = write_config(document)
    outputs = []
    for name in ["first", "second"]:
        out_dir = str(tmp_path / name)
        result = main.run_experiment(ExperimentId.DUALITY, config_path, out_dir)
        assert result.status == RunStatus.OK
        with open(os.path.join(out_dir, RESULTS_FILE_NAME)) as results_file:
            outputs.append(results_file.read())
    assert outputs[0] == outputs[1]


def test_seed_override_is_recorded(write_config, tmp_path):
    out_dir = str(tmp_path / "out")
    main.run_experiment(ExperimentId.CLASSIFY, write_config(_classify_document(None)), out_dir, seed=1234)
    assert _read_report(out_dir)["seed"] == 1234
    with open(os.path.join(out_dir, CONFIG_FILE_NAME)) as config_file:
        assert json.load(config_file)["parameters"]["seed"] == 1234


def test_command_line(write_config, tmp_path):
    out_dir = str(tmp_path / "out")
    completed = subprocess.run(
        [sys.executable, "run.py", "classify", "--config", write_config(_classify_document("NULL_RECURRENT")),
         "--out", out_dir], cwd=REPO_DIR, capture_output=True, text=True)
    assert completed.returncode == 0
    assert completed.stdout.startswith("OK")


def test_prefactor_miss_fails_the_run(write_config, tmp_path):
    up_drift = {"kind": "FINITE_SUPPORT_1D", "atoms": [[1, "0.75"], [-1, "0.25"]]}
    document = {"schema_version": 1, "experiment": "tail",
                "distribution": {"kind": "PRODUCT", "first": PLUS_MINUS_ONE, "second": up_drift},
                "parameters": {"seed": 21, "start": [1, 1], "paths": 20000, "harmonic_paths": 2000,
                               "n_grid": {"geometric": {"min": 1, "max": 1000, "per_decade": 10}},
                               "prefactor_tolerance": 1e-9}}
    out_dir = str(tmp_path / "out")
    result = main.run_experiment(ExperimentId.TAIL, write_config(document), out_dir)
    assert result.status == RunStatus.FAIL
    assert result.exit_status == 1
    report = _read_report(out_dir)
    assert report["results"]["prefactor"]["within_tolerance"] is False
    assert any("prefactor" in violation for violation in report["violations"])


@pytest.mark.slow
def test_shipped_positive_drift_config():
    result = main.run_experiment(ExperimentId.TAIL, os.path.join(REPO_DIR, "resources", "configs", "case_b.json"),
                                 None)
    assert result.status == RunStatus.OK
    assert result.outcome.report["flat_tail_check"]["passed"]
