"""Batch degradation, manifests and replay."""

from __future__ import annotations

import hashlib
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..errors import DuplicateImageId, VersionMismatch
from ..imagecore import raster_sha256
from .catalog import DegradeConfig
from .plan import PipelinePlan, apply_plan, check_severity, sample_plan

ENGINE_VERSION = "degradekit-degrade/1"

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """SplitMix64 step: add the golden gamma, then apply the finalizer."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def hash64(image_id: str) -> int:
    """First 8 bytes (little-endian) of the SHA-256 of the UTF-8 id."""
    return int.from_bytes(hashlib.sha256(image_id.encode("utf-8")).digest()[:8], "little")


def image_seed(global_seed: int, image_id: str) -> int:
    return splitmix64((int(global_seed) & _MASK64) ^ hash64(image_id))


@dataclass(frozen=True)
class ManifestRecord:
    image_id: str
    plan: PipelinePlan
    output_sha256: str
    output: str | None = None

    def to_dict(self) -> dict:
        d = {"image_id": self.image_id, "output_sha256": self.output_sha256,
             "plan": self.plan.to_dict()}
        if self.output is not None:
            d["output"] = self.output
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ManifestRecord":
        return cls(data["image_id"], PipelinePlan.from_dict(data["plan"]),
                   data["output_sha256"], data.get("output"))


@dataclass
class Manifest:
    global_seed: int
    config_digest: str
    engine_version: str = ENGINE_VERSION
    images: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "engine_version": self.engine_version,
            "global_seed": self.global_seed,
            "config_digest": self.config_digest,
            "images": [r.to_dict() for r in self.images],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Manifest":
        return cls(
            global_seed=int(data["global_seed"]),
            config_digest=data["config_digest"],
            engine_version=data["engine_version"],
            images=[ManifestRecord.from_dict(r) for r in data["images"]],
        )

    @classmethod
    def load(cls, path) -> "Manifest":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def degrade_one(img, image_id: str, config: DegradeConfig, severity: float, global_seed: int):
    h, w = img.shape[:2]
    plan = sample_plan(config, severity, image_seed(global_seed, image_id), (w, h))
    out = apply_plan(img, plan)
    return out, ManifestRecord(image_id, plan, raster_sha256(out))


def degrade_batch(images, config: DegradeConfig | None = None, severity: float = 0.5,
                  global_seed: int = 0, jobs: int = 1):
    """Degrade ``[(image_id, raster), ...]``; returns ``(outputs, manifest)``.

    Outputs keep the input order. Each image is seeded from its id alone, so
    results do not depend on ordering or on ``jobs``.
    """
    config = config or DegradeConfig()
    severity = check_severity(severity)
    images = list(images)
    ids = [image_id for image_id, _ in images]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise DuplicateImageId(f"duplicate image ids: {', '.join(dupes)}")

    def work(item):
        image_id, img = item
        return degrade_one(img, image_id, config, severity, global_seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, images))
    else:
        results = [work(item) for item in images]
    manifest = Manifest(global_seed=int(global_seed), config_digest=config.digest(),
                        images=[rec for _, rec in results])
    return [out for out, _ in results], manifest


def replay(img, record: ManifestRecord, engine_version: str = ENGINE_VERSION):
    if engine_version != ENGINE_VERSION:
        warnings.warn(f"manifest written by {engine_version!r}, replaying with {ENGINE_VERSION!r}",
                      VersionMismatch, stacklevel=2)
    return apply_plan(img, record.plan)
