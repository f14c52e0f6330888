"""Plan sampling and plan application."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParam, InvalidSeverity, MissingParam, UnknownOp
from .catalog import DegradeConfig, severity_gate
from .ops import OPS


@dataclass(frozen=True)
class ResolvedOp:
    op_id: str
    params: dict

    def to_dict(self) -> dict:
        return {"op_id": self.op_id, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "ResolvedOp":
        return cls(data["op_id"], dict(data.get("params", {})))


@dataclass(frozen=True)
class PipelinePlan:
    seed: int
    severity: float
    preloop: tuple = field(default_factory=tuple)
    main: tuple = field(default_factory=tuple)

    @property
    def steps(self) -> tuple:
        return tuple(self.preloop) + tuple(self.main)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "severity": self.severity,
            "preloop": [op.to_dict() for op in self.preloop],
            "main": [op.to_dict() for op in self.main],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelinePlan":
        return cls(
            seed=int(data["seed"]),
            severity=float(data["severity"]),
            preloop=tuple(ResolvedOp.from_dict(d) for d in data.get("preloop", [])),
            main=tuple(ResolvedOp.from_dict(d) for d in data.get("main", [])),
        )


def check_severity(severity) -> float:
    try:
        value = float(severity)
    except (TypeError, ValueError):
        raise InvalidSeverity(f"severity must be a number in [0, 1], got {severity!r}") from None
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InvalidSeverity(f"severity must be in [0, 1], got {severity!r}")
    return value


def _resolve(rng, op_cfg, severity, dims) -> ResolvedOp:
    lo = op_cfg.strength_lo
    hi = max(lo, min(op_cfg.strength_hi, severity))
    strength = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
    return ResolvedOp(op_cfg.op_id, OPS[op_cfg.op_id].resolve(rng, strength, dims))


def sample_plan(config: DegradeConfig, severity: float, seed: int, dims) -> PipelinePlan:
    """Draw a fully resolved plan for an image of size ``dims = (width, height)``.

    Draw order from a PCG64 stream seeded with ``seed``: preloop pair count,
    preloop params (jpeg then rescale, per pair), one inclusion uniform per
    catalog op, a permutation of the included ops, then each kept op's strength
    and params in execution order.
    """
    severity = check_severity(severity)
    seed = int(seed)
    if severity == 0.0:
        return PipelinePlan(seed, severity)
    rng = np.random.Generator(np.random.PCG64(seed))
    by_id = {op.op_id: op for op in config.ops}

    pairs = int(rng.integers(0, config.preloop_max_pairs + 1))
    preloop = []
    for _ in range(pairs):
        preloop.append(_resolve(rng, by_id["jpeg_compress"], severity, dims))
        preloop.append(_resolve(rng, by_id["random_rescale"], severity, dims))

    gate = severity_gate(severity)
    draws = rng.random(len(config.ops))
    included = [op for op, u in zip(config.ops, draws)
                if op.enabled and u < op.base_probability * gate]
    order = rng.permutation(len(included))
    chosen = [included[i] for i in order][:config.max_steps]
    main = [_resolve(rng, op, severity, dims) for op in chosen]
    return PipelinePlan(seed, severity, tuple(preloop), tuple(main))


def apply_op(img: np.ndarray, op: ResolvedOp) -> np.ndarray:
    try:
        definition = OPS[op.op_id]
    except KeyError:
        raise UnknownOp(f"unknown op_id {op.op_id!r}") from None
    missing = [name for name in definition.params if name not in op.params]
    if missing:
        raise MissingParam(f"{op.op_id} is missing params: {', '.join(missing)}")
    try:
        return definition.apply(img, op.params)
    except (IndexError, TypeError, ValueError, OverflowError) as exc:
        raise InvalidParam(f"{op.op_id} cannot apply params {op.params}: {exc}") from exc


def apply_plan(img: np.ndarray, plan: PipelinePlan) -> np.ndarray:
    out = np.array(img, dtype=np.float64, copy=True)
    for op in plan.steps:
        out = apply_op(out, op)
    return out
