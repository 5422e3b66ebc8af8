"""
Experiment workflow for the Regular Subspace Lab
Validation, execution, checking and reporting of one batch command
"""

import asyncio
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from labs.errors import ConfigError, PreconditionError
from labs.orchestrator.defaults import default_config
from labs.orchestrator.experiments import RunContext
from labs.orchestrator.reporting import failure_report_path, write_checks, write_failure_report
from labs.orchestrator.router import CommandRouter
from labs.orchestrator.schemas import validate_config
from labs.settings import DEFAULT_TOLERANCES, LabSettings, merged_tolerances

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3


class WorkflowStage(Enum):
    """Stages of one experiment run"""
    VALIDATION = "validation"
    EXECUTION = "execution"
    CHECKING = "checking"
    REPORTING = "reporting"


@dataclass
class ExperimentResult:
    """Exit code and artifacts of one run"""
    command: str
    exit_code: int
    output: Optional[str] = None
    failure_report: Optional[str] = None
    rows: List[Dict[str, Any]] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> int:
        return sum(1 for row in self.rows if not row["passed"])


class ExperimentWorkflow:
    """
    Runs one command end to end

    Exit codes: 0 when every check passes, 3 when a configured tolerance is
    missed, 2 for an invalid config or command, 1 for any other error.
    """

    def __init__(self, router: Optional[CommandRouter] = None, settings: Optional[LabSettings] = None):
        self.router = router or CommandRouter()
        self.settings = settings or LabSettings()
        self.logger = logging.getLogger(__name__)
        self.workflow_state: Dict[str, Dict[str, Any]] = {}
        self.logger.debug(f"Workflow settings: {self.settings.as_dict()}")

    async def run(self, command: str, config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None,
                  output: Optional[str] = None, sweep: bool = False) -> ExperimentResult:
        """
        Execute a command

        Args:
            command: Command name
            config: Experiment config (the command's default when omitted)
            seed: Seed overriding the config and the environment
            output: CSV path overriding the config
            sweep: Run the config's sweep schedule

        Returns:
            ExperimentResult with the exit code and written artifacts
        """
        run_id = f"LAB-{command}-{datetime.now().strftime('%Y%m%d-%H%M%S')}"
        self.workflow_state[run_id] = {"command": command}
        result = ExperimentResult(command=command, exit_code=EXIT_OK)

        try:
            await self._update_stage(run_id, WorkflowStage.VALIDATION)
            route = self.router.route(command)
            config = default_config(command) if config is None else config
            validate_config(command, config)
            result.output = self._output_path(command, config, output)
            context = self._context(config, seed, sweep)

            await self._update_stage(run_id, WorkflowStage.EXECUTION)
            self.logger.info(f"Running {command} with seed {context.seed}")
            result.rows = await asyncio.to_thread(route["runner"], config, context)

            await self._update_stage(run_id, WorkflowStage.CHECKING)
            if result.failed:
                result.exit_code = EXIT_CHECK_FAILED
                self.logger.warning(f"{result.failed} of {len(result.rows)} checks failed")

            await self._update_stage(run_id, WorkflowStage.REPORTING)
            write_checks(result.rows, result.output)
            if result.failed:
                result.failure_report = write_failure_report(command, result.rows, result.output)
            else:
                self._clear_stale_report(result.output)

        except (ConfigError, PreconditionError) as e:
            self.logger.error(f"Invalid experiment for {command}: {e}")
            result.exit_code = EXIT_USAGE
            result.error = str(e)
            self._report_error(result, e)
        except Exception as e:
            self.logger.error(f"Experiment {run_id} failed: {e}")
            result.exit_code = EXIT_ERROR
            result.error = str(e)
            self._report_error(result, e)

        self.workflow_state[run_id]["exit_code"] = result.exit_code
        self.logger.info(f"Experiment {run_id} finished with exit code {result.exit_code}")
        return result

    async def _update_stage(self, run_id: str, stage: WorkflowStage):
        self.workflow_state[run_id]["stage"] = stage.value
        self.logger.debug(f"Experiment {run_id} entered stage {stage.value}")

    def _output_path(self, command: str, config: Dict[str, Any], output: Optional[str]) -> str:
        if output:
            return output
        if config.get("output"):
            return config["output"]
        return os.path.join(self.settings.out_dir, f"{command}.csv")

    def _context(self, config: Dict[str, Any], seed: Optional[int], sweep: bool) -> RunContext:
        overrides = config.get("tolerances", {})
        unknown = sorted(set(overrides) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise ConfigError(f"unknown tolerance keys {unknown}; known keys are {sorted(DEFAULT_TOLERANCES)}")
        schedule: List[Dict[str, Any]] = []
        if sweep:
            schedule = config.get("sweep", [])
            if not schedule:
                raise ConfigError("--sweep needs a non-empty sweep list in the config")
        if seed is None:
            seed = config.get("seed", self.settings.seed)
        return RunContext(seed=int(seed), tolerances=merged_tolerances(overrides),
                          workers=self.settings.workers, sweep=schedule)

    def _clear_stale_report(self, output: str):
        stale = failure_report_path(output)
        if os.path.exists(stale):
            os.remove(stale)

    def _report_error(self, result: ExperimentResult, error: Exception):
        if result.output is None:
            return
        try:
            result.failure_report = write_failure_report(
                result.command, result.rows, result.output,
                error={"type": type(error).__name__, "message": str(error),
                       "details": getattr(error, "details", {})},
            )
        except OSError as e:
            self.logger.error(f"Could not write failure report: {e}")
