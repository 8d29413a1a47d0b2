#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Main entry point for the constructive-interference precoding simulator.
"""

import argparse
import logging
import os
import sys
from datetime import datetime

# Import local modules
from config import Config
from errors import ConfigError, NumericalError, ParameterError
from orchestrator import Orchestrator
from scenarios.scenario_config import get_scenario, list_scenarios, load_config_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def setup_logging(logs_dir, level=logging.INFO, console_level=None):
    """Configure the root logger with a run log file and a console handler."""
    console = logging.StreamHandler(sys.stdout)
    console.setLevel(console_level or level)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(logs_dir, f'ciprecode_run_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log')),
            console,
        ],
        force=True,
    )


def parse_args(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(prog='ciprecode',
                                     description='Constructive-interference symbol-level precoding simulator')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run a scenario and write its CSV')
    run.add_argument('--scenario', type=str, help='Built-in scenario id (see list-scenarios)')
    run.add_argument('--config', type=str, help='Path to a JSON scenario file')
    run.add_argument('--seed', type=int, help='Random seed (unsigned 64-bit)')
    run.add_argument('--trials', type=int, help='Channel draws per sweep point')
    run.add_argument('--out', type=str, help='Output CSV path')
    run.add_argument('--phi-grid-step', type=float, dest='phi_grid_step',
                     help='Offset grid step in degrees')
    run.add_argument('--threads', type=int, help='Worker threads (never changes results)')
    run.add_argument('--stamp', action='store_true', help='Write the run timestamp to the CSV')
    verbosity = run.add_mutually_exclusive_group()
    verbosity.add_argument('--quiet', action='store_true', help='Warnings only, no progress bars')
    verbosity.add_argument('--verbose', action='store_true', help='Debug logging')

    commands.add_parser('list-scenarios', help='List the built-in scenarios')

    show = commands.add_parser('show-scenario', help='Print the resolved configuration of a scenario')
    show.add_argument('--scenario', type=str, help='Built-in scenario id')
    show.add_argument('--config', type=str, help='Path to a JSON scenario file')

    args = parser.parse_args(argv)
    if args.command in ('run', 'show-scenario') and not (args.scenario or args.config):
        parser.error(f"{args.command} needs --scenario or --config")
    return args


def _run(args):
    config = Config()
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        config.threads = args.threads

    level = logging.DEBUG if args.verbose else logging.INFO
    setup_logging(config.logs_dir, level, logging.WARNING if args.quiet else level)
    logger.info("Starting constructive-interference precoding simulator")

    orchestrator = Orchestrator(config, progress=not args.quiet)
    table, path = orchestrator.run_scenario(
        scenario_id=args.scenario,
        config_path=args.config,
        out=args.out,
        stamp=args.stamp,
        seed=args.seed,
        trials=args.trials,
        phi_step_deg=args.phi_grid_step,
    )
    logger.info(f"Scenario {table.scenario} completed: {len(table)} rows in {path}")


def main(argv=None):
    """Main function of the command line interface; returns the exit code."""
    args = parse_args(argv)
    try:
        if args.command == 'list-scenarios':
            for name, description in list_scenarios():
                print(f"{name:8s} {description}")
        elif args.command == 'show-scenario':
            scenario = load_config_file(args.config) if args.config else get_scenario(args.scenario)
            print(scenario.model_dump_json(indent=2))
        else:
            _run(args)
    except (ConfigError, ParameterError) as e:
        logger.error(f"Configuration error: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Numerical failure: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
