"""Crop geometry for the local (face) and global streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateBox, NotPatchAligned
from ..imagecore import ResampleMode, resample_region, resize

PATCH = 14
STREAM_SIZE = 252
FACE_EXPANSION = 1.3


@dataclass(frozen=True)
class BBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise DegenerateBox(f"box must have positive size, got w={self.w}, h={self.h}")

    @property
    def center(self):
        return self.x + self.w / 2.0, self.y + self.h / 2.0


def patch_grid(dim: int, patch: int = PATCH) -> tuple[int, int]:
    remainder = dim % patch
    if remainder:
        raise NotPatchAligned(dim, patch, remainder)
    return dim // patch, dim // patch


def expand_bbox(box: BBox, factor: float, img_w: int, img_h: int) -> BBox:
    """Squarify ``box`` around its center, scale the side by ``factor`` and fit it in the image.

    The square is translated (not shrunk) back inside the image when possible;
    only when the image itself is smaller than the side is it clipped to
    ``min(img_w, img_h)``.
    """
    if not (box.w > 0 and box.h > 0):
        raise DegenerateBox(f"box must have positive size, got w={box.w}, h={box.h}")
    if factor < 1:
        raise ValueError(f"expansion factor must be >= 1, got {factor}")
    if box.x >= img_w or box.y >= img_h or box.x + box.w <= 0 or box.y + box.h <= 0:
        raise ValueError("box does not intersect the image")
    side = min(factor * max(box.w, box.h), img_w, img_h)
    cx, cy = box.center
    x = min(max(cx - side / 2.0, 0.0), img_w - side)
    y = min(max(cy - side / 2.0, 0.0), img_h - side)
    return BBox(x, y, side, side)


def crop_resize(img: np.ndarray, box: BBox, out: int = STREAM_SIZE) -> np.ndarray:
    patch_grid(out)
    return resample_region(img, box.x, box.y, box.w, box.h, out, out, ResampleMode.BILINEAR)


def center_crop(img: np.ndarray, out: int = STREAM_SIZE) -> np.ndarray:
    patch_grid(out)
    h, w = img.shape[:2]
    if min(w, h) < out:
        scale = out / min(w, h)
        if w <= h:
            new_w, new_h = out, max(out, int(np.floor(h * scale + 0.5)))
        else:
            new_w, new_h = max(out, int(np.floor(w * scale + 0.5))), out
        img = resize(img, new_w, new_h, ResampleMode.BILINEAR)
        h, w = new_h, new_w
    x0, y0 = (w - out) // 2, (h - out) // 2
    return img[y0:y0 + out, x0:x0 + out].copy()
