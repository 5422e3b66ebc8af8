"""
Exception hierarchy for the Regular Subspace Lab
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for every error raised by the lab"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class PreconditionError(LabError, ValueError):
    """An operation was called outside its documented preconditions"""


class DomainError(LabError, ValueError):
    """A value lies outside the range on which a map is defined"""


class ConstructionError(LabError):
    """A Cantor-type construction could not be carried out"""


class NumericConsistencyError(LabError):
    """Two independent computations disagree beyond their error bound"""


class NotMarkovianError(PreconditionError):
    """A quadratic form has a positive off-diagonal entry or a negative row sum"""


class UnsupportedProfileError(LabError):
    """A profile lacks the smoothness an operation needs"""


class AliasingError(LabError):
    """A jump atom cannot be resolved on the frequency grid"""


class GridConstructionError(LabError):
    """A chain grid produced a singular system"""


class ConfigError(LabError):
    """An experiment configuration failed schema validation"""
