"""Run-configuration and report schemas, normalization, and canonical JSON.

Configs are strict JSON: unknown keys are rejected, every field is typed,
and numeric preconditions live in the schema where they are static.  The
canonical serializer prints every float with 17 significant digits so that
reports are byte-stable and round-trip losslessly.
"""

from __future__ import annotations

import copy
import hashlib
import json

import jsonschema
import numpy as np

from .errors import ConfigError

__all__ = [
    "CONFIG_SCHEMA",
    "REPORT_SCHEMA",
    "validate_config",
    "normalize_config",
    "dumps_canonical",
    "results_sha256",
]

_NUMBER = {"type": "number"}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}

_INITIAL_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"const": "single_site"},
                "norm2": _NONNEG,
                "site": {"type": "integer"},
            },
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "path"],
            "properties": {
                "kind": {"const": "profile_file"},
                "path": {"type": "string"},
                "scale_to_norm2": {"oneOf": [_NONNEG, {"type": "null"}]},
            },
        },
    ]
}

_FAMILY_PROPS = {
    "epsilons": {"type": "array", "minItems": 1, "items": _POSITIVE},
    "c0": _NONNEG,
    "cu0": _NONNEG,
    "cv0": _NONNEG,
    "profile_site": {"type": "integer"},
    "perturb_site": {"type": "integer"},
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dglattice run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment"],
    "properties": {
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": _NUMBER,
                "beta": _NUMBER,
                "delta": _NUMBER,
                "gamma": _NUMBER,
                "mu": _NUMBER,
            },
        },
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "window_half_width": {"type": "integer", "minimum": 1},
                "blowup_threshold": _POSITIVE,
            },
        },
        "forcing": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"const": "single_site"},
                        "target_norm2": _NONNEG,
                        "site": {"type": "integer"},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "path"],
                    "properties": {
                        "kind": {"const": "profile_file"},
                        "path": {"type": "string"},
                        "scale_to_norm2": {"oneOf": [_NONNEG, {"type": "null"}]},
                    },
                },
            ]
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "abs_tol": _POSITIVE,
                "rel_tol": _POSITIVE,
                "sample_stride": _POSITIVE,
            },
        },
        "experiment": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "horizon"],
                    "properties": {
                        "kind": {"const": "simulate"},
                        "horizon": _POSITIVE,
                        "initial": _INITIAL_SCHEMA,
                        "snapshot_every": {
                            "oneOf": [{"type": "integer", "minimum": 1}, {"type": "null"}]
                        },
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"const": "classify"},
                        "v0_norm2": {"oneOf": [_NONNEG, {"type": "null"}]},
                        "capture_radius": {"oneOf": [_NONNEG, {"type": "null"}]},
                        "absorb_margin": {"type": "number", "exclusiveMinimum": 1},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "epsilons", "horizon"],
                    "properties": {
                        "kind": {"const": "closeness"},
                        "horizon": _POSITIVE,
                        **_FAMILY_PROPS,
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "epsilons", "transient_cut", "stride", "horizon"],
                    "properties": {
                        "kind": {"const": "congruence"},
                        "transient_cut": _NONNEG,
                        "stride": _POSITIVE,
                        "horizon": _POSITIVE,
                        **_FAMILY_PROPS,
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "xi", "k_grid", "horizon"],
                    "properties": {
                        "kind": {"const": "tail"},
                        "xi": _POSITIVE,
                        "k_grid": {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": "integer", "minimum": 0},
                        },
                        "horizon": _POSITIVE,
                        "initial": _INITIAL_SCHEMA,
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "chi0_grid", "horizon"],
                    "properties": {
                        "kind": {"const": "regime_verify"},
                        "chi0_grid": {"type": "array", "minItems": 1, "items": _NONNEG},
                        "horizon": _POSITIVE,
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"const": "identity_check"},
                        "num_states": {"type": "integer", "minimum": 1},
                        "half_width": {"type": "integer", "minimum": 1},
                    },
                },
            ]
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"oneOf": [{"type": "string"}, {"type": "null"}]},
                "formats": {
                    "type": "array",
                    "uniqueItems": True,
                    "items": {"enum": ["json", "csv", "plot"]},
                },
            },
        },
    },
}

_RESULT_SCHEMAS = {
    "simulate": {
        "times": {"type": "array", "items": _NUMBER},
        "chi": {"type": "array", "items": _NUMBER},
        "blowup_time": {"oneOf": [_NUMBER, {"type": "null"}]},
        "final_chi": _NUMBER,
    },
    "classify": {
        "case_label": {"enum": ["SubcriticalForcing", "SupercriticalAnnulus", "Critical"]},
        "a": _NUMBER,
        "b": _NUMBER,
        "c": _NUMBER,
        "d": _NUMBER,
        "k": {"oneOf": [_NUMBER, {"type": "null"}]},
        "r1": {"oneOf": [_NUMBER, {"type": "null"}]},
        "r2": {"oneOf": [_NUMBER, {"type": "null"}]},
        "restricted_radius_sq": _NUMBER,
        "delta0": {"oneOf": [_NUMBER, {"type": "null"}]},
        "rho_sq_ldgl": _NUMBER,
        "rho_sq_nldgl": {"oneOf": [_NUMBER, {"type": "null"}]},
        "nonescape_rho1": {"oneOf": [_NUMBER, {"type": "null"}]},
        "nonescape_r0_sq_printed": {"oneOf": [_NUMBER, {"type": "null"}]},
        "nonescape_r0_sq_alt": {"oneOf": [_NUMBER, {"type": "null"}]},
        "entry_time": {"oneOf": [_NUMBER, {"type": "null"}]},
    },
    "closeness": {
        "runs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "epsilon": _NUMBER,
                    "sup_distance_l2": _NUMBER,
                    "sup_distance_linf": _NUMBER,
                    "tail_window_limsup": _NUMBER,
                    "bound_used": _NUMBER,
                    "pass": {"type": "boolean"},
                    "diagnostic": {"oneOf": [{"type": "string"}, {"type": "null"}]},
                },
            },
        },
        "loglog_slope": {"oneOf": [_NUMBER, {"type": "null"}]},
        "all_pass": {"type": "boolean"},
    },
    "congruence": {
        "epsilons": {"type": "array", "items": _NUMBER},
        "distances": {"type": "array", "items": _NUMBER},
        "sampling_tolerances": {"type": "array", "items": _NUMBER},
        "bounds": {"type": "array", "items": _NUMBER},
        "c1": _NUMBER,
        "case_label": {"type": "string"},
        "within_bounds": {"type": "boolean"},
        "nonincreasing_within_tolerance": {"type": "boolean"},
    },
    "tail": {
        "xi": _NUMBER,
        "k_values": {"type": "array", "items": {"type": "integer"}},
        "trailing_times": {"type": "array", "items": _NUMBER},
        "tail_masses": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
        "min_k_passing": {"oneOf": [{"type": "integer"}, {"type": "null"}]},
        "time_of_entry": {"oneOf": [_NUMBER, {"type": "null"}]},
        "hypothesis_ok": {"type": "boolean"},
        "note": {"oneOf": [{"type": "string"}, {"type": "null"}]},
    },
    "regime_verify": {
        "case_label": {"type": "string"},
        "r1": {"oneOf": [_NUMBER, {"type": "null"}]},
        "r2": {"oneOf": [_NUMBER, {"type": "null"}]},
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "chi0": _NUMBER,
                    "monotone_nonincreasing": {"type": "boolean"},
                    "stays_in_annulus": {"oneOf": [{"type": "boolean"}, {"type": "null"}]},
                    "terminal_chi": _NUMBER,
                    "terminal_gap_to_r2": {"oneOf": [_NUMBER, {"type": "null"}]},
                    "riccati_envelope_ok": {"type": "boolean"},
                    "bernoulli_envelope_ok": {"oneOf": [{"type": "boolean"}, {"type": "null"}]},
                    "blowup_time": {"oneOf": [_NUMBER, {"type": "null"}]},
                },
            },
        },
    },
    "identity_check": {
        "num_states": {"type": "integer"},
        "half_width": {"type": "integer"},
        "self_adjoint_residual": _NUMBER,
        "negativity_residual": _NUMBER,
        "operator_norm_ratio": _NUMBER,
        "embedding_linf_excess": _NUMBER,
        "embedding_l4_excess": _NUMBER,
        "balance_residual_local": _NUMBER,
        "balance_residual_nonlocal": _NUMBER,
        "lipschitz_ratio": _NUMBER,
        "alternating_ratio": _NUMBER,
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "dglattice run report",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "config_echo", "results", "provenance"],
    "properties": {
        "schema_version": {"const": 1},
        "config_echo": CONFIG_SCHEMA,
        "results": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["experiment_kind"],
                    "properties": {"experiment_kind": {"const": kind}, **props},
                }
                for kind, props in sorted(_RESULT_SCHEMAS.items())
            ]
        },
        "provenance": {
            "type": "object",
            "additionalProperties": False,
            "required": ["code_version", "seed", "backend", "results_sha256"],
            "properties": {
                "code_version": {"type": "string"},
                "seed": {"type": "integer"},
                "backend": {"enum": ["compiled", "python"]},
                "results_sha256": {"type": "string"},
            },
        },
    },
}

_DEFAULTS = {
    "model": {"alpha": 0.0, "beta": 0.0, "delta": 2.0, "gamma": 1.0, "mu": 0.0},
    "lattice": {"window_half_width": 256, "blowup_threshold": 1e8},
    "forcing": {"kind": "single_site", "target_norm2": 0.0, "site": 0},
    "integrator": {"abs_tol": 1e-8, "rel_tol": 1e-6, "sample_stride": 0.25},
    "output": {"directory": None, "formats": ["json", "csv", "plot"]},
}

_EXPERIMENT_DEFAULTS = {
    "simulate": {"initial": {"kind": "single_site", "norm2": 1.0, "site": 0}, "snapshot_every": None},
    "classify": {"v0_norm2": None, "capture_radius": None, "absorb_margin": 1.1},
    # cv0 default leaves headroom for the orthogonal default perturbation,
    # which pushes ||v0|| slightly above cu0*eps.
    "closeness": {"c0": 1.0, "cu0": 1.0, "cv0": 2.0, "profile_site": 0, "perturb_site": 1},
    "congruence": {"c0": 1.0, "cu0": 1.0, "cv0": 2.0, "profile_site": 0, "perturb_site": 1},
    "tail": {"initial": {"kind": "single_site", "norm2": 1.0, "site": 0}},
    "regime_verify": {},
    "identity_check": {"num_states": 200, "half_width": 64},
}

_INITIAL_DEFAULTS = {
    "single_site": {"norm2": 1.0, "site": 0},
    "profile_file": {"scale_to_norm2": None},
}


def validate_config(config) -> None:
    """Validate against the strict schema; raise ConfigError naming the key."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        key = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config key '{key}': {err.message}", key=key)


def _filled(block: dict, defaults: dict) -> dict:
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(block))
    return out


def normalize_config(config) -> dict:
    """Validate and return the config with every default made explicit."""
    validate_config(config)
    out = {}
    for section, defaults in _DEFAULTS.items():
        block = config.get(section, {})
        if section == "forcing" and block:
            out[section] = _filled(
                block,
                _DEFAULTS["forcing"] if block.get("kind", "single_site") == "single_site" else {"scale_to_norm2": None},
            )
        else:
            out[section] = _filled(block, defaults)
    exp = copy.deepcopy(config["experiment"])
    kind = exp["kind"]
    exp = _filled(exp, _EXPERIMENT_DEFAULTS[kind])
    for field in ("initial",):
        if field in exp and isinstance(exp[field], dict):
            exp[field] = _filled(exp[field], _INITIAL_DEFAULTS[exp[field]["kind"]])
    out["experiment"] = exp
    validate_config(out)
    return out


def _canon(obj, pieces, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise ValueError("non-finite float in report payload")
        pieces.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        pieces.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, np.ndarray):
        _canon(obj.tolist(), pieces, indent, level)
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError("report keys must be strings")
            pieces.append(pad_in + json.dumps(key, ensure_ascii=False) + ": ")
            _canon(obj[key], pieces, indent, level + 1)
            pieces.append(",\n" if i + 1 < len(keys) else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for i, item in enumerate(obj):
            pieces.append(pad_in)
            _canon(item, pieces, indent, level + 1)
            pieces.append(",\n" if i + 1 < len(obj) else "\n")
        pieces.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def dumps_canonical(obj, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    pieces: list[str] = []
    _canon(obj, pieces, indent, 0)
    pieces.append("\n")
    return "".join(pieces)


def results_sha256(schema_version: int, config_echo: dict, results: dict) -> str:
    """Hash of the deterministic report region (timestamps live elsewhere)."""
    payload = dumps_canonical(
        {"schema_version": schema_version, "config_echo": config_echo, "results": results}
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
