"""Experiment configuration shared by the CLI subcommands."""

from __future__ import annotations

import json
import math
import shlex
from dataclasses import dataclass, field

import jsonschema

from ..degrade import DegradeConfig
from ..errors import ConfigError

DEFAULT_SEVERITIES = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)

_command = {"oneOf": [{"type": "string", "minLength": 1},
                      {"type": "array", "items": {"type": "string"}, "minItems": 1}]}

EXPERIMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "degradation": {"type": "object"},
        "ops": {"type": "array"},
        "preloop_max_pairs": {"type": "integer"},
        "max_steps": {"type": "integer"},
        "severities": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "jobs": {"type": "integer", "minimum": 1},
        "detector_command": _command,
        "enhancer_command": _command,
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0},
                    "minItems": 3, "maxItems": 3},
        "mode": {"enum": ["discretized", "continuous"]},
        "base_threshold": {"type": "number", "minimum": 0, "maximum": 1},
    },
    "additionalProperties": False,
}


def check_severity_value(value) -> float:
    """Severities on the command line must be multiples of 0.1 in [0, 1]."""
    try:
        s = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for severity: {value!r} is not a number") from None
    if not math.isfinite(s) or not 0.0 <= s <= 1.0 or abs(s * 10 - round(s * 10)) > 1e-9:
        raise ConfigError(f"invalid value for severity: {value} (must be a multiple of 0.1 in [0, 1])")
    return round(s, 1)


def as_argv(command) -> list[str] | None:
    if command is None:
        return None
    return shlex.split(command) if isinstance(command, str) else list(command)


@dataclass
class ExperimentConfig:
    degradation: DegradeConfig = field(default_factory=DegradeConfig)
    severities: tuple = DEFAULT_SEVERITIES
    seed: int = 0
    jobs: int = 1
    detector_command: list | None = None
    enhancer_command: list | None = None
    weights: tuple = (1.0, 2.0, 2.0)
    mode: str = "discretized"
    base_threshold: float = 0.5

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(data, EXPERIMENT_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid config at {where}: {exc.message}") from exc
        inline = {k: data[k] for k in ("ops", "preloop_max_pairs", "max_steps") if k in data}
        if inline and "degradation" in data:
            raise ConfigError("invalid config: give either 'degradation' or top-level ops, not both")
        degradation = DegradeConfig.from_dict(data.get("degradation", inline))
        cfg = cls(degradation=degradation)
        if "severities" in data:
            cfg.severities = tuple(check_severity_value(s) for s in data["severities"])
        for key in ("seed", "jobs", "mode", "base_threshold"):
            if key in data:
                setattr(cfg, key, data[key])
        if "weights" in data:
            if sum(data["weights"]) <= 0:
                raise ConfigError("invalid config at weights: at least one weight must be positive")
            cfg.weights = tuple(float(w) for w in data["weights"])
        cfg.detector_command = as_argv(data.get("detector_command"))
        cfg.enhancer_command = as_argv(data.get("enhancer_command"))
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("invalid config at <root>: expected a JSON object")
        return cls.from_dict(data)
