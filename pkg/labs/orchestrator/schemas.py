"""
Experiment configuration schemas for the Regular Subspace Lab
JSON schemas per command and the column layout of the check tables
"""

from typing import Any, Dict

import jsonschema

from labs.errors import ConfigError

# Every CSV row the lab writes has exactly these columns, in this order
CHECK_COLUMNS = [
    "command",
    "check",
    "inputs",
    "estimate",
    "error_bar",
    "exact",
    "oracle",
    "error",
    "tolerance",
    "passed",
]

DEFINITIONS: Dict[str, Any] = {
    "interval": {
        "type": "array",
        "items": {"type": "number"},
        "minItems": 2,
        "maxItems": 2,
    },
    "scale": {
        "type": "object",
        "properties": {
            "family": {"enum": ["fat_cantor", "inverse_cantor", "identity", "affine_slope"]},
            "parameters": {
                "type": "object",
                "properties": {
                    "flat_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                    "slope": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                },
                "additionalProperties": False,
            },
            "depth": {"type": "integer", "minimum": 0},
            "anchor": {"type": ["number", "null"]},
            "domain_interval": {"$ref": "#/definitions/interval"},
        },
        "required": ["family"],
        "additionalProperties": False,
    },
    "profile": {
        "type": "object",
        "properties": {
            "kind": {"enum": ["hat", "bump", "scaled", "clamped"]},
            "p": {"type": "number"},
            "q": {"type": "number"},
            "height": {"type": "number"},
            "amplitude": {"type": "number"},
            "factor": {"type": "number"},
            "lo": {"type": "number"},
            "hi": {"type": "number"},
            "base": {"$ref": "#/definitions/profile"},
        },
        "required": ["kind"],
        "additionalProperties": False,
    },
    "sweep_entry": {
        "type": "object",
        "properties": {
            "depth": {"type": "integer", "minimum": 0},
            "grid_n": {"type": "integer", "minimum": 1},
            "dt": {"type": "number", "exclusiveMinimum": 0},
        },
        "additionalProperties": False,
    },
    "grid_function": {
        "type": "object",
        "properties": {
            "kind": {"enum": ["gaussian", "smooth_bump"]},
            "center": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            "sigma": {"type": "number", "exclusiveMinimum": 0},
            "radius": {"type": "number", "exclusiveMinimum": 0},
            "amplitude": {"type": "number"},
        },
        "required": ["kind", "center"],
        "additionalProperties": False,
    },
    "symbol": {
        "type": "object",
        "properties": {
            "S": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}, "minItems": 1},
            "atoms": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": [
                        {"type": ["number", "array"]},
                        {"type": "number", "exclusiveMinimum": 0},
                    ],
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        "required": ["S"],
        "additionalProperties": False,
    },
    "finite_form": {
        "type": "object",
        "properties": {
            "states": {"type": "array", "minItems": 1},
            "m": {"type": "array", "items": {"type": "number"}},
            "J": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            "k": {"type": "array", "items": {"type": "number"}},
        },
        "required": ["states", "m", "J"],
        "additionalProperties": False,
    },
    "test_function": {
        "type": "object",
        "properties": {
            "kind": {"enum": ["indicator_above", "indicator_below", "constant", "clip"]},
            "threshold": {"type": "number"},
            "value": {"type": "number"},
            "lo": {"type": "number"},
            "hi": {"type": "number"},
        },
        "required": ["kind"],
        "additionalProperties": False,
    },
}

GLOBAL_PROPERTIES: Dict[str, Any] = {
    "seed": {"type": "integer", "minimum": 0},
    "output": {"type": "string", "minLength": 1},
    "tolerances": {
        "type": "object",
        "additionalProperties": {"type": "number", "minimum": 0},
    },
    "sweep": {"type": "array", "items": {"$ref": "#/definitions/sweep_entry"}},
}

VERIFY_ENERGY_PROPERTIES: Dict[str, Any] = {
    "scale": {"$ref": "#/definitions/scale"},
    "profile": {"$ref": "#/definitions/profile"},
    "depths": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
    "grid_n": {"type": "integer", "minimum": 1},
    "quad_n": {"type": "integer", "minimum": 16},
    "expect_ratio": {"type": "number", "exclusiveMinimum": 0},
    "generator_partner": {"$ref": "#/definitions/profile"},
}

EXIT_STATS_PROPERTIES: Dict[str, Any] = {
    "scale": {"$ref": "#/definitions/scale"},
    "a": {"type": "number"},
    "b": {"type": "number"},
    "x0": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 1}]},
    "n_paths": {"type": "integer", "minimum": 2},
    "dt": {"type": "number", "exclusiveMinimum": 0},
    "epsilon": {"type": "number", "exclusiveMinimum": 0},
    "oracle_n": {"type": "integer", "minimum": 2},
    "occupation_window": {"$ref": "#/definitions/interval"},
    "workers": {"type": "integer", "minimum": 1},
}

LEVY_PROPERTIES: Dict[str, Any] = {
    "symbol": {"$ref": "#/definitions/symbol"},
    "box": {
        "type": "object",
        "properties": {
            "lower": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}}]},
            "upper": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}}]},
            "n": {"type": "integer", "minimum": 8},
        },
        "required": ["lower", "upper", "n"],
        "additionalProperties": False,
    },
    "fixture": {"$ref": "#/definitions/grid_function"},
    "plancherel": {"type": "boolean"},
    "pairing": {
        "type": "object",
        "properties": {
            "u": {"$ref": "#/definitions/grid_function"},
            "v": {"$ref": "#/definitions/grid_function"},
            "refinements": {"type": "integer", "minimum": 0, "maximum": 3},
        },
        "required": ["u", "v"],
        "additionalProperties": False,
    },
    "certificate_fixtures": {"type": "array", "items": {"$ref": "#/definitions/grid_function"}},
}

DISCRETE_PROPERTIES: Dict[str, Any] = {
    "forms": {"type": "array", "items": {"$ref": "#/definitions/finite_form"}},
    "random_forms": {"type": "integer", "minimum": 0},
    "n_states": {"type": "integer", "minimum": 2},
    "perturbations": {"type": "integer", "minimum": 0},
    "pipeline": {
        "type": "array",
        "items": {
            "type": "object",
            "properties": {
                "op": {"enum": ["kill", "resurrect", "homeomorph", "time_change"]},
                "args": {"type": "object"},
            },
            "required": ["op"],
            "additionalProperties": False,
        },
    },
}

COUPLING_PROPERTIES: Dict[str, Any] = {
    "components": {
        "type": "array",
        "items": {
            "type": "object",
            "properties": {
                "scale": {"$ref": "#/definitions/scale"},
                "interval": {"$ref": "#/definitions/interval"},
            },
            "required": ["scale", "interval"],
            "additionalProperties": False,
        },
        "minItems": 1,
        "maxItems": 4,
    },
    "factors": {"type": "array", "items": {"$ref": "#/definitions/profile"}, "minItems": 1},
    "grid_n": {"type": "integer", "minimum": 16},
    "quad_n": {"type": "integer", "minimum": 16},
    "expected_flat_masses": {"type": "array", "items": {"type": "number", "minimum": 0}},
    "rectangles": {
        "type": "array",
        "items": {
            "type": "object",
            "properties": {
                "sides": {"type": "array", "items": {"$ref": "#/definitions/interval"}},
                "admits": {"type": "boolean"},
            },
            "required": ["sides", "admits"],
            "additionalProperties": False,
        },
    },
    "independence": {
        "type": "object",
        "properties": {
            "components": {"type": "array", "items": {"$ref": "#/definitions/scale"}, "minItems": 2, "maxItems": 2},
            "x0": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "T": {"type": "number", "exclusiveMinimum": 0},
            "dt": {"type": "number", "exclusiveMinimum": 0},
            "n_paths": {"type": "integer", "minimum": 2},
            "pairs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "f": {"$ref": "#/definitions/test_function"},
                        "g": {"$ref": "#/definitions/test_function"},
                    },
                    "required": ["f", "g"],
                    "additionalProperties": False,
                },
                "minItems": 1,
            },
        },
        "required": ["components", "x0", "T", "dt", "n_paths", "pairs"],
        "additionalProperties": False,
    },
}

SELFTEST_PROPERTIES: Dict[str, Any] = {
    "skip": {
        "type": "array",
        "items": {"enum": ["verify-energy", "exit-stats", "levy", "discrete", "coupling"]},
    },
    "quick": {"type": "boolean"},
}


def _schema(properties: Dict[str, Any], required=()) -> Dict[str, Any]:
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "definitions": DEFINITIONS,
        "properties": {**GLOBAL_PROPERTIES, **properties},
        "required": list(required),
        "additionalProperties": False,
    }


COMMAND_SCHEMAS: Dict[str, Dict[str, Any]] = {
    "verify-energy": _schema(VERIFY_ENERGY_PROPERTIES, ["scale", "profile"]),
    "exit-stats": _schema(EXIT_STATS_PROPERTIES, ["scale", "a", "b", "x0"]),
    "levy": _schema(LEVY_PROPERTIES, ["symbol", "box", "fixture"]),
    "discrete": _schema(DISCRETE_PROPERTIES),
    "coupling": _schema(COUPLING_PROPERTIES, ["components", "factors"]),
    "selftest": _schema(SELFTEST_PROPERTIES),
}


def validate_config(command: str, config: Dict[str, Any]) -> None:
    """
    Validate an experiment configuration against its command schema

    Args:
        command: Command name
        config: Parsed JSON document

    Raises:
        ConfigError: Unknown command or schema violation
    """
    if command not in COMMAND_SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    validator = jsonschema.Draft7Validator(COMMAND_SCHEMAS[command])
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        location = "/".join(str(part) for part in first.absolute_path) or "<root>"
        raise ConfigError(
            f"invalid {command} config at {location}: {first.message}",
            {"errors": [error.message for error in errors]},
        )
