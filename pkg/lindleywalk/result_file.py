import csv
import json
import math
import os
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from lindleywalk.config_file import ExperimentConfig, ExperimentConfigJson, save_experiment_config_to_json_file
from lindleywalk.core.common import RunStatus, SCHEMA_VERSION

CONFIG_FILE_NAME = "config.json"
RESULTS_FILE_NAME = "results.csv"
REPORT_FILE_NAME = "report.json"


# JSON has no inf/nan and no numpy scalars
def to_json_value(value):
    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_json_value(value.tolist())
    if isinstance(value, Enum):
        return value.name
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_results_csv(file_path: str, header: List[str], rows: List[List[Any]]):
    with open(file_path, 'w', newline='') as results_file:
        writer = csv.writer(results_file)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, Enum):
        return value.name
    if value is None:
        return ""
    return value


def build_report(status: RunStatus, config: Optional[ExperimentConfig], report: Dict[str, Any],
                 violations: List[Any], error: Optional[Exception] = None) -> Dict[str, Any]:
    data = {
        "schema_version": SCHEMA_VERSION,
        "status": status.name.lower(),
        "config": ExperimentConfigJson.serialize(config) if config is not None else None,
        "seed": config.seed if config is not None else None,
        "violations": violations,
        "results": report
    }
    if error is not None:
        data["error"] = {"type": type(error).__name__, "message": str(error)}
    return to_json_value(data)


def write_report_json(file_path: str, report: Dict[str, Any]):
    with open(file_path, 'w') as report_file:
        report_file.write(json.dumps(report, indent=2, sort_keys=True, allow_nan=False))


def write_artifacts(out_dir: str, status: RunStatus, config: Optional[ExperimentConfig],
                    header: Optional[List[str]], rows: Optional[List[List[Any]]], report: Dict[str, Any],
                    violations: List[Any], error: Optional[Exception] = None):
    os.makedirs(out_dir, exist_ok=True)
    if config is not None:
        save_experiment_config_to_json_file(config, os.path.join(out_dir, CONFIG_FILE_NAME))
    if header is not None:
        write_results_csv(os.path.join(out_dir, RESULTS_FILE_NAME), header, rows)
    write_report_json(os.path.join(out_dir, REPORT_FILE_NAME), build_report(status, config, report, violations, error))
