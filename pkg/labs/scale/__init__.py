"""
Scale function package for the Regular Subspace Lab
"""

from .cantor import cantor_function, ternary_digits, triadic_snap
from .functions import (
    ScaleFamily,
    ScaleFunction,
    InverseScale,
    build_fat_cantor,
    build_inverse_cantor,
    build_identity,
    build_affine_slope,
    scale_from_descriptor
)
from .measures import (
    MonotoneMeasure,
    stieltjes_measure,
    stieltjes_integrate,
    cantor_measure,
    lebesgue_measure
)

__all__ = [
    'cantor_function',
    'ternary_digits',
    'triadic_snap',
    'ScaleFamily',
    'ScaleFunction',
    'InverseScale',
    'build_fat_cantor',
    'build_inverse_cantor',
    'build_identity',
    'build_affine_slope',
    'scale_from_descriptor',
    'MonotoneMeasure',
    'stieltjes_measure',
    'stieltjes_integrate',
    'cantor_measure',
    'lebesgue_measure'
]

__version__ = "1.0.0"
