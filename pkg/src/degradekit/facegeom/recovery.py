"""Face-detection recovery: seven classical rescue filters around a pluggable detector."""

from __future__ import annotations

import enum
import os
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field

import cv2
import numpy as np
from scipy import ndimage
from skimage.restoration import denoise_nl_means

from .. import imagecore as ic
from ..errors import DetectorError, EmptyInput, ExternalCommandFailed
from .geometry import BBox

STRICT_THRESHOLD = 0.9
DEFAULT_BASE_THRESHOLD = 0.5

STEP_NAMES = ("bilateral", "median_heavy", "external_enhance", "sharpen_clahe",
              "nlmeans", "median_secondary", "nlmeans_clahe")


@dataclass(frozen=True)
class RecoveryStep:
    step_index: int
    name: str
    accept_threshold: float


def recovery_steps(base_threshold: float = DEFAULT_BASE_THRESHOLD) -> list[RecoveryStep]:
    """The canonical chain; the last step always uses the strict 0.9 threshold."""
    return [RecoveryStep(i, name, STRICT_THRESHOLD if i == 7 else base_threshold)
            for i, name in enumerate(STEP_NAMES, start=1)]


@dataclass(frozen=True)
class HookConfig:
    """External command templates. ``enhancer`` is an argv list using ``{input}`` and ``{output}``."""

    enhancer: tuple | None = None
    timeout: float | None = 300.0


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    bbox: BBox | None = None
    confidence: float | None = None

    def __post_init__(self):
        if (self.bbox is None) != (self.confidence is None):
            raise ValueError("bbox and confidence must be both present or both absent")


class Status(enum.Enum):
    DIRECT_HIT = "DirectHit"
    RECOVERED = "Recovered"
    FAILED = "Failed"


@dataclass(frozen=True)
class RecoveryOutcome:
    image_id: str
    status: Status
    detection: DetectionRecord | None = None
    steps_attempted: int = 0
    recovered_step: int | None = None
    skipped_steps: tuple = field(default_factory=tuple)


# --------------------------------------------------------------------------
# filters


def _median(img, size):
    return ndimage.median_filter(img, size=(size, size, 1), mode="mirror")


def bilateral(img):
    out = cv2.bilateralFilter(img.astype(np.float32), d=11, sigmaColor=0.1, sigmaSpace=5.0)
    return ic.clamp(out.astype(np.float64))


def clahe_luma(img, clip_limit=2.0, tiles=8):
    ycc = ic.to_ycbcr(img)
    engine = cv2.createCLAHE(clipLimit=clip_limit, tileGridSize=(tiles, tiles))
    ycc[..., 0] = engine.apply(ic.to_uint8(ycc[..., 0])) / 255.0
    return ic.from_ycbcr(ycc)


def unsharp(img, amount=1.0, sigma=1.5):
    return ic.clamp(img + amount * (img - ic.gaussian_blur(img, sigma)))


def nlmeans(img):
    out = denoise_nl_means(img, h=0.1, patch_size=7, patch_distance=10, channel_axis=-1)
    return ic.clamp(out)


def run_enhancer(img, argv_template, timeout=None):
    with tempfile.TemporaryDirectory(prefix="degradekit-enh-") as tmp:
        src, dst = os.path.join(tmp, "input.png"), os.path.join(tmp, "output.png")
        ic.write_png(src, img)
        argv = [a.replace("{input}", src).replace("{output}", dst) for a in argv_template]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ExternalCommandFailed(f"enhancer could not run: {exc}") from exc
        if proc.returncode != 0:
            raise ExternalCommandFailed(
                f"enhancer exited with {proc.returncode}: {proc.stderr.decode(errors='replace').strip()}")
        try:
            out = ic.read_image(dst)
        except (OSError, ValueError) as exc:
            raise ExternalCommandFailed(f"enhancer output unreadable: {exc}") from exc
    if out.shape[:2] != img.shape[:2]:
        out = ic.resize(out, img.shape[1], img.shape[0], ic.ResampleMode.BICUBIC)
    return out


def is_skipped(step: RecoveryStep, hooks: HookConfig | None) -> bool:
    return step.name == "external_enhance" and not (hooks and hooks.enhancer)


def apply_recovery_filter(img, step: RecoveryStep, hooks: HookConfig | None = None):
    name = step.name
    if name == "bilateral":
        return bilateral(img)
    if name == "median_heavy":
        return _median(img, 7)
    if name == "external_enhance":
        if is_skipped(step, hooks):
            return img.copy()
        return run_enhancer(img, hooks.enhancer, hooks.timeout)
    if name == "sharpen_clahe":
        return clahe_luma(unsharp(img))
    if name == "nlmeans":
        return nlmeans(img)
    if name == "median_secondary":
        return _median(img, 5)
    if name == "nlmeans_clahe":
        return clahe_luma(nlmeans(img))
    raise ValueError(f"unknown recovery step {name!r}")


# --------------------------------------------------------------------------
# orchestration


def _best(detector, img, image_id):
    try:
        candidates = detector.detect(img, image_id)
    except DetectorError:
        raise
    except Exception as exc:
        raise DetectorError(f"detector failed on {image_id!r}: {exc}") from exc
    if not candidates:
        return None
    box, conf = max(candidates, key=lambda c: c[1])
    return DetectionRecord(image_id, box, float(conf))


def recover_detection(img, detector, steps=None, base_threshold: float = DEFAULT_BASE_THRESHOLD,
                      hooks: HookConfig | None = None, image_id: str = "") -> RecoveryOutcome:
    """Detect on the raw image, then retry on each filtered copy of the original.

    ``steps=[]`` disables the chain. Acceptance needs ``confidence >= threshold``.
    """
    steps = recovery_steps(base_threshold) if steps is None else list(steps)
    found = _best(detector, img, image_id)
    if found is not None and found.confidence >= base_threshold:
        return RecoveryOutcome(image_id, Status.DIRECT_HIT, found, 0)
    skipped = []
    for attempted, step in enumerate(steps, start=1):
        if is_skipped(step, hooks):
            skipped.append(step.step_index)
        filtered = apply_recovery_filter(img, step, hooks)
        found = _best(detector, filtered, image_id)
        if found is not None and found.confidence >= step.accept_threshold:
            return RecoveryOutcome(image_id, Status.RECOVERED, found, attempted,
                                   step.step_index, tuple(skipped))
    return RecoveryOutcome(image_id, Status.FAILED, None, len(steps), None, tuple(skipped))


def recover_batch(images, detector, steps=None, base_threshold=DEFAULT_BASE_THRESHOLD,
                  hooks=None, jobs=1):
    """Run :func:`recover_detection` over ``[(image_id, img), ...]``, keeping input order.

    Detectors with ``serial = True`` are called under a lock.
    """
    if getattr(detector, "serial", False) and jobs > 1:
        detector = _Serialized(detector)

    def work(item):
        image_id, img = item
        return recover_detection(img, detector, steps, base_threshold, hooks, image_id)

    items = list(images)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, items))
    return [work(item) for item in items]


class _Serialized:
    def __init__(self, inner):
        self.inner = inner
        self.lock = threading.Lock()

    def detect(self, img, image_id):
        with self.lock:
            return self.inner.detect(img, image_id)


def recovery_report(outcomes) -> dict:
    outcomes = list(outcomes)
    if not outcomes:
        raise EmptyInput("no recovery outcomes to summarize")
    per_step = {str(i): 0 for i in range(1, len(STEP_NAMES) + 1)}
    direct = failed = 0
    for o in outcomes:
        if o.status is Status.DIRECT_HIT:
            direct += 1
        elif o.status is Status.RECOVERED:
            per_step[str(o.recovered_step)] = per_step.get(str(o.recovered_step), 0) + 1
        else:
            failed += 1
    return {
        "total": len(outcomes),
        "direct": direct,
        "recovered_per_step": per_step,
        "recovered": sum(per_step.values()),
        "failed": failed,
        "failure_rate": failed / len(outcomes),
    }
