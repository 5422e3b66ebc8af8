"""
Finite-state Dirichlet form package for the Regular Subspace Lab
"""

from .forms import FiniteForm, bd_decompose, random_form, DYADIC_DENOMINATOR
from .transforms import (
    SubspaceReport,
    kill,
    resurrect,
    homeomorph,
    transport,
    inverse_map,
    time_change,
    subspace_check,
    apply_pipeline,
    TRANSFORMS
)

__all__ = [
    'FiniteForm',
    'bd_decompose',
    'random_form',
    'DYADIC_DENOMINATOR',
    'SubspaceReport',
    'kill',
    'resurrect',
    'homeomorph',
    'transport',
    'inverse_map',
    'time_change',
    'subspace_check',
    'apply_pipeline',
    'TRANSFORMS'
]

__version__ = "1.0.0"
