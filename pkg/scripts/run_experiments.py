#!/usr/bin/env python3
"""Run the packaged experiments against the built-in scenario and print a report.

Usage:
    python3 scripts/run_experiments.py            # all experiments
    python3 scripts/run_experiments.py 2          # a single experiment
    python3 scripts/run_experiments.py controller # the path-controller checks
"""

import sys

from flexsim.controller import Controller
from flexsim.experiments import EXPERIMENT_IDS, run_experiment
from flexsim.scenario import load_builtin_scenario


def main(argv: list[str]) -> int:
    targets = argv or list(EXPERIMENT_IDS)
    unknown = [t for t in targets if t not in EXPERIMENT_IDS]
    if unknown:
        print(f"unknown experiment(s): {', '.join(unknown)}", file=sys.stderr)
        print(f"choose from: {', '.join(EXPERIMENT_IDS)}", file=sys.stderr)
        return 2
    failed = False
    for target in targets:
        # Fresh state per experiment so delay changes do not leak across runs.
        report = run_experiment(Controller(load_builtin_scenario()), target)
        print(report.render())
        failed |= not report.passed
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
