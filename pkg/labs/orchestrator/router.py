"""
Router for the Regular Subspace Lab
Maps command names to experiment runners and their config schemas
"""

import logging
from enum import Enum
from typing import Any, Callable, Dict, List

from labs.errors import ConfigError
from labs.orchestrator.defaults import selftest_plan
from labs.orchestrator.experiments import RUNNERS, RunContext, Rows, run_plan
from labs.orchestrator.schemas import COMMAND_SCHEMAS, validate_config


class LabCommand(Enum):
    """Batch commands of the lab"""
    VERIFY_ENERGY = "verify-energy"
    EXIT_STATS = "exit-stats"
    LEVY = "levy"
    DISCRETE = "discrete"
    COUPLING = "coupling"
    SELFTEST = "selftest"


class CommandRouter:
    """
    Resolves a command name to the runner that executes it

    Every runner takes a validated config and a RunContext and returns the
    rows of the check table.
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.runners: Dict[LabCommand, Callable[[Dict[str, Any], RunContext], Rows]] = {
            LabCommand(name): runner for name, runner in RUNNERS.items()
        }
        self.runners[LabCommand.SELFTEST] = self._run_selftest

    @staticmethod
    def commands() -> List[str]:
        return [command.value for command in LabCommand]

    def route(self, command: str) -> Dict[str, Any]:
        """
        Resolve a command

        Args:
            command: Command name as given on the command line

        Returns:
            Dict with the LabCommand, its runner and its JSON schema
        """
        try:
            resolved = LabCommand(command)
        except ValueError as e:
            self.logger.error(f"Unknown command {command!r}")
            raise ConfigError(f"unknown command {command!r}; expected one of {self.commands()}") from e
        return {
            "command": resolved,
            "runner": self.runners[resolved],
            "schema": COMMAND_SCHEMAS[resolved.value],
        }

    def _run_selftest(self, config: Dict[str, Any], context: RunContext) -> Rows:
        """Run the built-in plan, minus skipped commands, with the caller's seed and tolerances"""
        skip = set(config.get("skip", []))
        plan = [(name, sub) for name, sub in selftest_plan(config.get("quick", False)) if name not in skip]
        for name, sub in plan:
            validate_config(name, sub)
        self.logger.info(f"Selftest plan: {[name for name, _ in plan]}")
        selftest_context = RunContext(seed=context.seed, tolerances=context.tolerances, workers=context.workers)
        return run_plan(plan, selftest_context)
