#!/usr/bin/env python3
"""
Command-line entry point for the Regular Subspace Lab
Runs one batch experiment from a JSON config and writes its check table as CSV
"""

import argparse
import asyncio
import json
import os
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from labs.errors import ConfigError  # noqa: E402
from labs.logging_setup import configure_logging  # noqa: E402
from labs.orchestrator import EXIT_USAGE, CommandRouter, ExperimentWorkflow  # noqa: E402
from labs.settings import LabSettings  # noqa: E402


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lab_cli",
        description="Numerical checks of regular subspaces of Dirichlet forms",
    )
    parser.add_argument("command", choices=CommandRouter.commands(), help="experiment to run")
    parser.add_argument("--config", help="path to a JSON experiment config (defaults to the built-in one)")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", help="CSV output path (overrides the config)")
    parser.add_argument("--sweep", action="store_true", help="run the sweep schedule listed in the config")
    parser.add_argument("--log-level", help="log level (default from SUBSPACE_LAB_LOG_LEVEL)")
    parser.add_argument("--workers", type=int, help="threads for Monte Carlo paths")
    return parser


def load_config(path: Optional[str]) -> Optional[Dict[str, Any]]:
    """Read a JSON config; None means the command's default"""
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)

    settings = LabSettings.from_env()
    if args.log_level:
        settings.log_level = args.log_level.upper()
    if args.workers:
        settings.workers = args.workers
    configure_logging(settings.log_level, settings.log_json)

    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(f"lab_cli: {e}", file=sys.stderr)
        return EXIT_USAGE

    workflow = ExperimentWorkflow(settings=settings)
    result = asyncio.run(workflow.run(args.command, config, seed=args.seed, output=args.out, sweep=args.sweep))

    if result.error:
        print(f"lab_cli: {args.command} stopped: {result.error}", file=sys.stderr)
    else:
        print(f"{args.command}: {len(result.rows) - result.failed}/{len(result.rows)} checks passed, "
              f"table written to {result.output}")
    if result.failure_report:
        print(f"failure report: {result.failure_report}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
