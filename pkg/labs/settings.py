"""
Configuration for the Regular Subspace Lab
Documented numerical defaults plus environment-driven runtime settings
"""

import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

# Inverse evaluation by monotone bisection
BISECTION_TOLERANCE = 1e-12
BISECTION_MAX_ITER = 200

# Relative eigenvalue threshold for the rank of S
RANK_THRESHOLD = 1e-10

# Gauss-Legendre nodes per quadrature cell
GAUSS_POINTS = 5

# Monte Carlo
DEFAULT_N_PATHS = 20_000
DEFAULT_SE_MULTIPLIER = 3.0
PATH_CHUNK_STEPS = 1024

# Nodes processed per block by the finite-difference energies
FD_BLOCK = 1 << 20

DEFAULT_TOLERANCES: Dict[str, float] = {
    # forms1d
    "subspace_relative": 1e-3,
    "counterexample_ratio": 1e-6,
    "weak_generator": 1e-6,
    # levy
    "levy_relative": 1e-3,
    "pairing": 1e-3,
    "diagonalize": 1e-10,
    # coupling
    "product_relative": 1e-3,
    "permutation_relative": 1e-12,
    "flat_mass": 1e-12,
    # simulate
    "se_multiplier": DEFAULT_SE_MULTIPLIER,
    "chain_probability": 1e-6,
    "exit_time_relative": 0.02,
    # discrete algebra is exact
    "discrete": 0.0,
}


def merged_tolerances(overrides: Optional[Dict[str, float]] = None) -> Dict[str, float]:
    """Return the default tolerances with user overrides applied"""
    tolerances = dict(DEFAULT_TOLERANCES)
    if overrides:
        tolerances.update(overrides)
    return tolerances


@dataclass
class LabSettings:
    """Runtime settings read from the environment"""
    log_level: str = "INFO"
    log_json: bool = False
    workers: int = 1
    seed: int = 20240601
    out_dir: str = "results"

    @classmethod
    def from_env(cls) -> "LabSettings":
        """
        Build settings from SUBSPACE_LAB_* environment variables

        Returns:
            LabSettings with environment overrides applied
        """
        return cls(
            log_level=os.getenv("SUBSPACE_LAB_LOG_LEVEL", "INFO").upper(),
            log_json=os.getenv("SUBSPACE_LAB_LOG_JSON", "0") in ("1", "true", "yes"),
            workers=int(os.getenv("SUBSPACE_LAB_WORKERS", "1")),
            seed=int(os.getenv("SUBSPACE_LAB_SEED", "20240601")),
            out_dir=os.getenv("SUBSPACE_LAB_OUT_DIR", "results"),
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "log_level": self.log_level,
            "log_json": self.log_json,
            "workers": self.workers,
            "seed": self.seed,
            "out_dir": self.out_dir,
        }
