"""Operation catalog and the JSON degradation config."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

import jsonschema

from ..errors import ConfigError
from .ops import OPS

DEFAULT_BASE_PROBABILITY = 0.35
MAX_PRELOOP_PAIRS = 5
MAX_STEPS = 15


@dataclass(frozen=True)
class OpSpec:
    op_id: str
    category: str
    base_probability: float = DEFAULT_BASE_PROBABILITY
    strength_range: tuple = (0.0, 1.0)
    paper_named: bool = True


def op_catalog() -> list[OpSpec]:
    """The 18 operations in canonical order, with default probabilities."""
    return [OpSpec(d.op_id, d.category, paper_named=d.paper_named) for d in OPS.values()]


@dataclass(frozen=True)
class OpConfig:
    op_id: str
    enabled: bool = True
    base_probability: float = DEFAULT_BASE_PROBABILITY
    strength_lo: float = 0.0
    strength_hi: float = 1.0


def _default_ops():
    return tuple(OpConfig(spec.op_id) for spec in op_catalog())


CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "ops": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "op_id": {"type": "string", "enum": list(OPS)},
                    "enabled": {"type": "boolean"},
                    "base_probability": {"type": "number", "minimum": 0, "maximum": 1},
                    "strength_lo": {"type": "number", "minimum": 0, "maximum": 1},
                    "strength_hi": {"type": "number", "minimum": 0, "maximum": 1},
                },
                "required": ["op_id"],
                "additionalProperties": False,
            },
        },
        "preloop_max_pairs": {"type": "integer", "minimum": 0, "maximum": MAX_PRELOOP_PAIRS},
        "max_steps": {"type": "integer", "minimum": 0, "maximum": MAX_STEPS},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class DegradeConfig:
    """Per-op overrides on top of the catalog defaults.

    ``ops`` always holds all 18 entries in catalog order, so two configs that
    mean the same thing serialize (and digest) identically.
    """

    ops: tuple = field(default_factory=_default_ops)
    preloop_max_pairs: int = MAX_PRELOOP_PAIRS
    max_steps: int = MAX_STEPS

    @classmethod
    def from_dict(cls, data: dict) -> "DegradeConfig":
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid degradation config at {where}: {exc.message}") from exc
        by_id = {op.op_id: op for op in _default_ops()}
        seen = set()
        for entry in data.get("ops", []):
            op_id = entry["op_id"]
            if op_id in seen:
                raise ConfigError(f"invalid degradation config at ops: duplicate op_id {op_id!r}")
            seen.add(op_id)
            updated = replace(by_id[op_id], **{k: v for k, v in entry.items() if k != "op_id"})
            if updated.strength_lo > updated.strength_hi:
                raise ConfigError(f"invalid degradation config at ops/{op_id}: strength_lo > strength_hi")
            by_id[op_id] = updated
        return cls(
            ops=tuple(by_id[spec.op_id] for spec in op_catalog()),
            preloop_max_pairs=data.get("preloop_max_pairs", MAX_PRELOOP_PAIRS),
            max_steps=data.get("max_steps", MAX_STEPS),
        )

    @classmethod
    def load(cls, path) -> "DegradeConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "ops": [asdict(op) for op in self.ops],
            "preloop_max_pairs": self.preloop_max_pairs,
            "max_steps": self.max_steps,
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def expected_op_count(self, severity: float) -> float:
        """Expected main-list length before truncation."""
        gate = severity_gate(severity)
        return sum(op.base_probability * gate for op in self.ops if op.enabled)


def severity_gate(severity: float) -> float:
    return min(1.0, 2.0 * severity)
