#!/usr/bin/env python3

import argparse
import logging
import sys

from lindleywalk import main
from lindleywalk.core.common import ExperimentId

parser = argparse.ArgumentParser(description="Lindley processes and exit times from the quadrant")
parser.add_argument('experiment', choices=[e.name.lower() for e in ExperimentId])
parser.add_argument('--config', required=True)
parser.add_argument('--out')
parser.add_argument('--workers', type=int, default=1)
parser.add_argument('--seed', type=int)
parser.add_argument('--verbose', action='store_true')
args = parser.parse_args()

logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                    format="%(levelname)s %(name)s: %(message)s")

result = main.run_experiment(ExperimentId[args.experiment.upper()], args.config, args.out, args.workers, args.seed)
if result.error is not None:
    print("ERROR " + type(result.error).__name__ + ": " + str(result.error))
else:
    print(result.status.name + ": " + result.outcome.summary)
    for violation in result.outcome.violations:
        print("  " + str(violation))
sys.exit(result.exit_status)
