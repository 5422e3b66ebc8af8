"""
Orchestrator package for the Regular Subspace Lab
Routes batch commands to experiment runners and reports their checks
"""

from .router import CommandRouter, LabCommand
from .workflow import (
    EXIT_CHECK_FAILED,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    ExperimentResult,
    ExperimentWorkflow,
    WorkflowStage,
)
from .schemas import CHECK_COLUMNS, COMMAND_SCHEMAS, validate_config
from .defaults import DEFAULT_CONFIGS, default_config, selftest_plan
from .experiments import RunContext

__all__ = [
    'CommandRouter',
    'LabCommand',
    'ExperimentWorkflow',
    'ExperimentResult',
    'WorkflowStage',
    'EXIT_OK',
    'EXIT_ERROR',
    'EXIT_USAGE',
    'EXIT_CHECK_FAILED',
    'CHECK_COLUMNS',
    'COMMAND_SCHEMAS',
    'validate_config',
    'DEFAULT_CONFIGS',
    'default_config',
    'selftest_plan',
    'RunContext',
]

__version__ = "1.0.0"
