"""
Shared fixtures for the Regular Subspace Lab test suite
"""

import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from labs.forms1d import BumpProfile, CoreFunction, HatProfile  # noqa: E402
from labs.scale import build_affine_slope, build_fat_cantor, build_identity  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def identity_scale():
    return build_identity((0.0, 1.0))


@pytest.fixture
def fat_cantor():
    """λ = 1/2 at depth 6"""
    return build_fat_cantor(0.5, 6)


@pytest.fixture
def affine_half():
    return build_affine_slope(0.5)


@pytest.fixture
def bump():
    return BumpProfile(0.05, 0.45)


@pytest.fixture
def unit_hat_on_identity(identity_scale):
    return CoreFunction(HatProfile(0.0, 1.0), identity_scale)


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path / "results")
