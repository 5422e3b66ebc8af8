"""
Default experiment configurations
Used when a command runs without --config, and as the selftest plan
"""

import copy
from typing import Any, Dict, List, Tuple

FAT_CANTOR_HALF = {"family": "fat_cantor", "parameters": {"flat_fraction": 0.5}, "depth": 10}
IDENTITY = {"family": "identity"}

DEFAULT_CONFIGS: Dict[str, Dict[str, Any]] = {
    "verify-energy": {
        "scale": FAT_CANTOR_HALF,
        "profile": {"kind": "bump", "p": 0.05, "q": 0.45},
        "depths": [6, 8, 10],
        "grid_n": 65536,
        "quad_n": 256,
        "generator_partner": {"kind": "bump", "p": 0.1, "q": 0.4},
    },
    "exit-stats": {
        "scale": {**FAT_CANTOR_HALF, "depth": 8},
        "a": 0.0,
        "b": 1.0,
        "x0": [0.3, 0.5, 0.7],
        "n_paths": 20000,
        "dt": 1e-4,
        "oracle_n": 2000,
    },
    "levy": {
        "symbol": {
            "S": [[1.0, 0.0], [0.0, 1.0]],
            "atoms": [[[0.5, 0.0], 1.0], [[-0.5, 0.0], 1.0], [[0.0, 0.5], 1.0], [[0.0, -0.5], 1.0]],
        },
        "box": {"lower": -4.0, "upper": 4.0, "n": 256},
        "fixture": {"kind": "gaussian", "center": [0.0, 0.0], "sigma": 0.5},
        "plancherel": True,
        "pairing": {
            "u": {"kind": "smooth_bump", "center": [-0.25, 0.0], "radius": 0.2},
            "v": {"kind": "smooth_bump", "center": [0.25, 0.0], "radius": 0.2},
            "refinements": 1,
        },
        "certificate_fixtures": [
            {"kind": "gaussian", "center": [0.0, 0.0], "sigma": 0.5},
            {"kind": "smooth_bump", "center": [0.5, -0.5], "radius": 1.0},
        ],
    },
    "discrete": {
        "random_forms": 200,
        "n_states": 5,
        "perturbations": 50,
        "pipeline": [
            {"op": "kill", "args": {"k": [0.5, 0.0, 0.25, 0.0, 1.0]}},
            {"op": "homeomorph", "args": {"sigma": {"0": 1, "1": 2, "2": 0, "3": 3, "4": 4}}},
            {"op": "resurrect"},
            {"op": "time_change", "args": {"mu": [1.0, 2.0, 1.0, 0.5, 1.0]}},
        ],
    },
    "coupling": {
        "components": [
            {"scale": IDENTITY, "interval": [0.0, 1.0]},
            {"scale": {**FAT_CANTOR_HALF, "depth": 6}, "interval": [0.0, 1.0]},
        ],
        "factors": [
            {"kind": "bump", "p": 0.1, "q": 0.9},
            {"kind": "bump", "p": 0.05, "q": 0.45},
        ],
        "expected_flat_masses": [0.0, 0.4921875],
        "rectangles": [
            {"sides": [[0.0, 1.0], [0.0, 1.0]], "admits": True},
            {"sides": [[0.0, 0.5], [0.0, 1.0]], "admits": False},
        ],
        "independence": {
            "components": [IDENTITY, {**FAT_CANTOR_HALF, "depth": 6}],
            "x0": [0.5, 0.3],
            "T": 0.25,
            "dt": 1e-3,
            "n_paths": 2000,
            "pairs": [
                {"f": {"kind": "indicator_above", "threshold": 0.5},
                 "g": {"kind": "indicator_above", "threshold": 0.3}},
                {"f": {"kind": "clip", "lo": 0.0, "hi": 1.0},
                 "g": {"kind": "indicator_below", "threshold": 0.2}},
                {"f": {"kind": "constant", "value": 1.0},
                 "g": {"kind": "clip", "lo": 0.0, "hi": 1.0}},
            ],
        },
    },
    "selftest": {},
}

# AffineSlope(1/2) violates the subspace identity with E^(s)/½D = 2 exactly
COUNTEREXAMPLE_CONFIG: Dict[str, Any] = {
    "scale": {"family": "affine_slope", "parameters": {"slope": 0.5}},
    "profile": {"kind": "bump", "p": 0.05, "q": 0.45},
    "grid_n": 65536,
    "expect_ratio": 2.0,
}

IDENTITY_COUPLING_CONFIG: Dict[str, Any] = {
    "components": [
        {"scale": IDENTITY, "interval": [0.0, 1.0]},
        {"scale": IDENTITY, "interval": [0.0, 1.0]},
    ],
    "factors": [
        {"kind": "bump", "p": 0.2, "q": 0.8},
        {"kind": "bump", "p": 0.2, "q": 0.8},
    ],
    "expected_flat_masses": [0.0, 0.0],
}

SELFTEST_EXIT_CONFIG: Dict[str, Any] = {
    "scale": {**FAT_CANTOR_HALF, "depth": 8},
    "a": 0.0,
    "b": 1.0,
    "x0": [0.3, 0.5, 0.7],
    "n_paths": 4000,
    "dt": 1e-4,
    "oracle_n": 2000,
}

SELFTEST_IDENTITY_EXIT_CONFIG: Dict[str, Any] = {
    "scale": IDENTITY,
    "a": 0.0,
    "b": 1.0,
    "x0": 0.5,
    "n_paths": 4000,
    "dt": 1e-4,
    "oracle_n": 2000,
    "occupation_window": [0.25, 0.75],
}

# Smaller sample sizes and grids for --quick selftests
QUICK_OVERRIDES: Dict[str, Dict[str, Any]] = {
    "verify-energy": {"depths": [8, 10], "grid_n": 16384},
    "exit-stats": {"n_paths": 400, "dt": 1e-3, "oracle_n": 400},
    "discrete": {"random_forms": 20, "perturbations": 10},
    "coupling": {"grid_n": 256},
}


def default_config(command: str) -> Dict[str, Any]:
    return copy.deepcopy(DEFAULT_CONFIGS[command])


def selftest_plan(quick: bool = False) -> List[Tuple[str, Dict[str, Any]]]:
    """
    The (command, config) pairs run by selftest, in order

    Args:
        quick: Apply QUICK_OVERRIDES

    Returns:
        List of (command, config)
    """
    plan = [
        ("discrete", default_config("discrete")),
        ("levy", default_config("levy")),
        ("verify-energy", default_config("verify-energy")),
        ("verify-energy", copy.deepcopy(COUNTEREXAMPLE_CONFIG)),
        ("coupling", default_config("coupling")),
        ("coupling", copy.deepcopy(IDENTITY_COUPLING_CONFIG)),
        ("exit-stats", copy.deepcopy(SELFTEST_EXIT_CONFIG)),
        ("exit-stats", copy.deepcopy(SELFTEST_IDENTITY_EXIT_CONFIG)),
    ]
    if quick:
        for command, config in plan:
            overrides = dict(QUICK_OVERRIDES.get(command, {}))
            if command == "verify-energy" and "depths" not in config:
                overrides.pop("depths", None)
            if command == "coupling" and "independence" in config:
                config["independence"]["n_paths"] = 200
            config.update(overrides)
    return plan
