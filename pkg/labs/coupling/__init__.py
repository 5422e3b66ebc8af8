"""
Independent coupling package for the Regular Subspace Lab
"""

from .product import (
    ProductForm,
    TensorFunction,
    ProperCertificate,
    product_energy,
    properness_certificate,
    rectangle_part_core,
    direct_dirichlet_energy
)

__all__ = [
    'ProductForm',
    'TensorFunction',
    'ProperCertificate',
    'product_energy',
    'properness_certificate',
    'rectangle_part_core',
    'direct_dirichlet_energy'
]

__version__ = "1.0.0"
