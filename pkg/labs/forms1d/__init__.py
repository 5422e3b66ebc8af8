"""
One-dimensional subspace energy package for the Regular Subspace Lab
"""

from .energy import (
    CoreFunction,
    SubspaceIdentityReport,
    energy_Es,
    energy_bilinear,
    dirichlet_energy,
    fd_step,
    l2_norm_squared,
    verify_subspace_identity,
    weak_generator_residual,
    energy_sweep,
    SWEEP_COLUMNS,
    DEFAULT_GRID_N
)
from .profiles import (
    Profile,
    HatProfile,
    BumpProfile,
    ScaledProfile,
    ClampedProfile,
    profile_from_descriptor
)

__all__ = [
    'CoreFunction',
    'SubspaceIdentityReport',
    'energy_Es',
    'energy_bilinear',
    'dirichlet_energy',
    'fd_step',
    'l2_norm_squared',
    'verify_subspace_identity',
    'weak_generator_residual',
    'energy_sweep',
    'SWEEP_COLUMNS',
    'DEFAULT_GRID_N',
    'Profile',
    'HatProfile',
    'BumpProfile',
    'ScaledProfile',
    'ClampedProfile',
    'profile_from_descriptor'
]

__version__ = "1.0.0"
