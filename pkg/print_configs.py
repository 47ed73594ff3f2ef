#!/usr/bin/env python3

import glob
import json
import os

from lindleywalk.config_file import load_experiment_config_from_json_file
from lindleywalk.core.classification import classify_regime
from lindleywalk.core.experiment_data import experiment_id_from_name
from lindleywalk.core.moments import check_assumptions, moments
from lindleywalk.register_experiments import register_all_experiments

CONFIG_DIR = "resources/configs"


def print_configs():
    for config_path in sorted(glob.glob(os.path.join(CONFIG_DIR, "*.json"))):
        with open(config_path) as config_file:
            experiment_name = json.loads(config_file.read())["experiment"]
        config = load_experiment_config_from_json_file(config_path, experiment_id_from_name(experiment_name))
        if config.distribution is not None:
            dist = config.distribution
            classification = classify_regime(moments(dist), assumptions=check_assumptions(dist))
            regime = classification.case_label.name + " / " + classification.verdict.name
        else:
            regime = "1-D " + config.marginal.kind.name
        print("{:<28}".format(os.path.basename(config_path)) + "{:<12}".format(experiment_name) + regime)


register_all_experiments()
print_configs()
