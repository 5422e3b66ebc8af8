"""
Regular Subspace Lab
Numerical laboratory for regular subspaces of Dirichlet forms
"""

__version__ = "1.0.0"
