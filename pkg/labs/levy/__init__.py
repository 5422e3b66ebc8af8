"""
Lévy form package for the Regular Subspace Lab
"""

from .symbol import LevySymbol, Diagonalization, symbol_eval, diagonalize
from .grid import GridFunction
from .energy import (
    DirectEnergy,
    PositivityCertificate,
    energy_fourier,
    energy_direct,
    energy_direct_bilinear,
    pairing_identity_residual,
    local_positivity_certificate
)

__all__ = [
    'LevySymbol',
    'Diagonalization',
    'symbol_eval',
    'diagonalize',
    'GridFunction',
    'DirectEnergy',
    'PositivityCertificate',
    'energy_fourier',
    'energy_direct',
    'energy_direct_bilinear',
    'pairing_identity_residual',
    'local_positivity_certificate'
]

__version__ = "1.0.0"
