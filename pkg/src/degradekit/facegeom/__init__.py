"""Crop geometry and detection recovery for the local and global streams."""

from .detectors import CommandDetector, FileDetector
from .geometry import (FACE_EXPANSION, PATCH, STREAM_SIZE, BBox, center_crop, crop_resize,
                       expand_bbox, patch_grid)
from .recovery import (STEP_NAMES, STRICT_THRESHOLD, DetectionRecord, HookConfig,
                       RecoveryOutcome, RecoveryStep, Status, apply_recovery_filter,
                       recover_batch, recover_detection, recovery_report, recovery_steps)

__all__ = [
    "FACE_EXPANSION", "PATCH", "STEP_NAMES", "STREAM_SIZE", "STRICT_THRESHOLD", "BBox",
    "CommandDetector", "DetectionRecord", "FileDetector", "HookConfig", "RecoveryOutcome",
    "RecoveryStep", "Status", "apply_recovery_filter", "center_crop", "crop_resize",
    "expand_bbox", "patch_grid", "recover_batch", "recover_detection", "recovery_report",
    "recovery_steps",
]
