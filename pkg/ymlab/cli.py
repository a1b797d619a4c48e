# Copyright 2024 ymlab developers

# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.


"""
Command line: ``ymlab <subcommand> [--preset NAME] [--config PATH] [--output DIR] ...``.

Exit codes: 0 success, 1 numerical failure (flow instability or a failed
identity), 2 usage, configuration, input file or probe error.
"""

import argparse
import logging
import sys

import yaml

from ymlab.exceptions import (
    ConfigError,
    FlowInstabilityError,
    InsufficientLadderError,
    InvalidProbeError,
    WrapContaminationError,
)
from ymlab.experiment import Experiment, load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

SUBCOMMANDS = {
    "run": "run every diagnostic of the experiment",
    "flow-run": "evolve the flow and write the energy ledger and snapshots",
    "density-probe": "evaluate theta at the probes of a CSV file (z1..zm,tau,rho)",
    "singular-extract": "extract the epsilon-threshold singular set",
    "diag-monotonicity": "fit the monotonicity constant over the density ladder",
    "diag-slice": "slice-integral ladders along sampled 4-planes",
    "diag-cone": "cone-concentration and directional-density tests",
    "diag-pde": "density-evolution residual under stencil refinement",
    "identity-suite": "energy, rescaling and global-integral identities",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ymlab", description="Yang-Mills flow and singular-set numerical laboratory."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", help="YAML configuration file")
        sub.add_argument("--preset", help="named preset the configuration file overlays")
        sub.add_argument("--output", help="output directory (overrides output.directory)")
        sub.add_argument("--workers", type=int, default=1, help="worker threads for probes")
        sub.add_argument("--seed", type=int, help="override every seed of the configuration")
        sub.add_argument("--verbose", action="store_true", help="log progress at INFO level")
        if name == "density-probe":
            sub.add_argument("--probes", required=True, help="CSV file with z1..zm,tau,rho")
        if name == "singular-extract":
            sub.add_argument("--epsilon", type=float, help="threshold (overrides singular.epsilon)")
    return parser


def dispatch(experiment, args):
    if args.command == "run":
        return experiment.run()
    if args.command == "flow-run":
        return experiment.flow_run()
    if args.command == "density-probe":
        return experiment.density_probe(args.probes)
    if args.command == "singular-extract":
        return experiment.singular_extract(args.epsilon)
    if args.command == "diag-monotonicity":
        return experiment.diag_monotonicity()
    if args.command == "diag-slice":
        return experiment.diag_slice()
    if args.command == "diag-cone":
        return experiment.diag_cone()
    if args.command == "diag-pde":
        return experiment.diag_pde()
    return experiment.identity_suite()


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.workers < 1:
        print("ymlab: error: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    preset = args.preset
    if preset is None and args.config is None and args.command == "identity-suite":
        preset = "su2-identity"

    try:
        config = load_config(args.config, preset, args.seed)
        experiment = Experiment(config, args.output, args.workers, args.verbose)
        lines = dispatch(experiment, args)
        if args.command != "run":
            experiment.finish()
    except (ConfigError, InvalidProbeError) as error:
        kind = "invalid probe" if isinstance(error, InvalidProbeError) else "invalid config"
        print("ymlab: %s: %s" % (kind, error), file=sys.stderr)
        return EXIT_USAGE
    except (WrapContaminationError, InsufficientLadderError) as error:
        print("ymlab: invalid config: %s" % error, file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, yaml.YAMLError, ValueError) as error:
        print("ymlab: error: %s" % error, file=sys.stderr)
        return EXIT_USAGE
    except FlowInstabilityError as error:
        print("ymlab: flow instability: %s" % error, file=sys.stderr)
        return EXIT_NUMERICAL

    for line in lines:
        print(line)
    if experiment.failures:
        logger.warning("Failed checks: %s", ", ".join(experiment.failures))
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
