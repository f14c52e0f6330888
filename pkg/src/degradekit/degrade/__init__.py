"""Compound degradation engine: catalog, plan sampling, batch runs and replay."""

from .batch import (ENGINE_VERSION, Manifest, ManifestRecord, degrade_batch, degrade_one,
                    hash64, image_seed, replay, splitmix64)
from .catalog import CONFIG_SCHEMA, DegradeConfig, OpConfig, OpSpec, op_catalog, severity_gate
from .ops import CATEGORIES, OPS, motion_kernel
from .plan import PipelinePlan, ResolvedOp, apply_op, apply_plan, sample_plan

__all__ = [
    "CATEGORIES", "CONFIG_SCHEMA", "ENGINE_VERSION", "OPS", "DegradeConfig", "Manifest",
    "ManifestRecord", "OpConfig", "OpSpec", "PipelinePlan", "ResolvedOp", "apply_op",
    "apply_plan", "degrade_batch", "degrade_one", "hash64", "image_seed", "motion_kernel",
    "op_catalog", "replay", "sample_plan", "severity_gate", "splitmix64",
]
