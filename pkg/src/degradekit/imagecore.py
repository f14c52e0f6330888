"""Raster primitives shared by every other module.

Images are plain ``numpy`` arrays of shape ``(H, W, 3)``, dtype float64, holding
sRGB samples in [0, 1].  8-bit values only exist at the codec boundary.  All
functions return new arrays and never modify their inputs.
"""

from __future__ import annotations

import enum
import hashlib
import io

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import DimensionMismatch, InvalidQuality, MalformedFile, UnsupportedFormat

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
JPEG_SOI = b"\xff\xd8\xff"

PSNR_CAP = 99.0

# Pillow's integer codes for chroma subsampling
SUBSAMPLING_CODES = {"4:4:4": 0, "4:2:2": 1, "4:2:0": 2}


class ResampleMode(enum.IntEnum):
    NEAREST = 0
    BILINEAR = 1
    BICUBIC = 2


def as_raster(data) -> np.ndarray:
    """Validate and copy ``data`` into a float64 ``(H, W, 3)`` raster."""
    img = np.array(data, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"expected an (H, W, 3) raster, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("raster contains non-finite samples")
    return img


def clamp(img: np.ndarray) -> np.ndarray:
    return np.clip(img, 0.0, 1.0)


def to_uint8(img: np.ndarray) -> np.ndarray:
    # round half up; np.round would use banker's rounding
    return np.floor(clamp(img) * 255.0 + 0.5).astype(np.uint8)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    return arr.astype(np.float64) / 255.0


def raster_sha256(img: np.ndarray) -> str:
    """SHA-256 over the 8-bit quantized samples, prefixed by the dimensions."""
    h, w = img.shape[:2]
    digest = hashlib.sha256(f"{w}x{h}:".encode())
    digest.update(np.ascontiguousarray(to_uint8(img)).tobytes())
    return digest.hexdigest()


# --------------------------------------------------------------------------
# codecs


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or baseline JPEG bytes into a raster.

    Grayscale is replicated across channels and alpha is dropped.
    """
    if data.startswith(PNG_SIGNATURE):
        fmt = "PNG"
    elif data.startswith(JPEG_SOI):
        fmt = "JPEG"
    else:
        raise UnsupportedFormat("only PNG and JPEG files are supported")
    try:
        with Image.open(io.BytesIO(data), formats=[fmt]) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I;16L", "I"):
                arr = np.asarray(im, dtype=np.float64)
                scale = 65535.0 if arr.max(initial=0) > 255 else 255.0
                arr = np.floor(arr / scale * 255.0 + 0.5).clip(0, 255).astype(np.uint8)
                rgb = np.repeat(arr[..., None], 3, axis=2)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (OSError, SyntaxError, ValueError) as exc:
        raise MalformedFile(f"cannot decode {fmt} data: {exc}") from exc
    return from_uint8(rgb)


def encode_image(img: np.ndarray, format: str = "PNG", jpeg_quality: int = 90,
                 jpeg_subsampling: str = "4:2:0") -> bytes:
    format = format.upper()
    pil = Image.fromarray(to_uint8(img), mode="RGB")
    buf = io.BytesIO()
    if format == "PNG":
        pil.save(buf, format="PNG", optimize=False, compress_level=6)
    elif format in ("JPEG", "JPG"):
        if isinstance(jpeg_quality, bool) or int(jpeg_quality) != jpeg_quality \
                or not 1 <= jpeg_quality <= 100:
            raise InvalidQuality(f"JPEG quality must be an integer in 1..100, got {jpeg_quality!r}")
        if jpeg_subsampling not in SUBSAMPLING_CODES:
            raise ValueError(f"unknown chroma subsampling {jpeg_subsampling!r}")
        pil.save(buf, format="JPEG", quality=int(jpeg_quality),
                 subsampling=SUBSAMPLING_CODES[jpeg_subsampling],
                 optimize=False, progressive=False)
    else:
        raise UnsupportedFormat(f"cannot encode format {format!r}")
    return buf.getvalue()


def read_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def write_png(path, img: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_image(img, "PNG"))


# --------------------------------------------------------------------------
# color


def to_ycbcr(img: np.ndarray) -> np.ndarray:
    """Full-range BT.601 RGB -> YCbCr, all planes in [0, 1] for in-gamut input."""
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = (b - y) / 1.772 + 0.5
    cr = (r - y) / 1.402 + 0.5
    return np.stack([y, cb, cr], axis=-1)


def from_ycbcr(ycc: np.ndarray, clip: bool = True) -> np.ndarray:
    y, cb, cr = ycc[..., 0], ycc[..., 1] - 0.5, ycc[..., 2] - 0.5
    r = y + 1.402 * cr
    b = y + 1.772 * cb
    g = (y - 0.299 * r - 0.114 * b) / 0.587
    out = np.stack([r, g, b], axis=-1)
    return clamp(out) if clip else out


# --------------------------------------------------------------------------
# resampling


def _catmull_rom(d: np.ndarray) -> np.ndarray:
    a = -0.5
    d = np.abs(d)
    near = ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0
    far = ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a
    return np.where(d <= 1.0, near, np.where(d < 2.0, far, 0.0))


def _axis_taps(start: float, length: float, n_out: int, n_src: int, mode: ResampleMode):
    """Source indices and weights, shape (n_out, taps), for one axis.

    Output sample ``i`` sits at source coordinate
    ``start + (i + 0.5) * length / n_out - 0.5`` (half-pixel centers).
    """
    centers = start + (np.arange(n_out) + 0.5) * (length / n_out)
    pos = centers - 0.5
    if mode == ResampleMode.NEAREST:
        idx = np.floor(centers).astype(np.int64)[:, None]
        weights = np.ones((n_out, 1))
    elif mode == ResampleMode.BILINEAR:
        base = np.floor(pos)
        t = pos - base
        idx = base.astype(np.int64)[:, None] + np.arange(2)[None, :]
        weights = np.stack([1.0 - t, t], axis=1)
    elif mode == ResampleMode.BICUBIC:
        base = np.floor(pos)
        t = pos - base
        offsets = np.arange(-1, 3)
        idx = base.astype(np.int64)[:, None] + offsets[None, :]
        weights = _catmull_rom(t[:, None] - offsets[None, :])
        weights = weights / weights.sum(axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown resample mode {mode!r}")
    return np.clip(idx, 0, n_src - 1), weights


def _resample_axis(img: np.ndarray, axis: int, idx: np.ndarray, weights: np.ndarray) -> np.ndarray:
    out = None
    for t in range(idx.shape[1]):
        taken = np.take(img, idx[:, t], axis=axis)
        shape = [1] * img.ndim
        shape[axis] = -1
        term = taken * weights[:, t].reshape(shape)
        out = term if out is None else out + term
    return out


def resample_region(img: np.ndarray, x: float, y: float, w: float, h: float,
                    out_w: int, out_h: int, mode=ResampleMode.BILINEAR) -> np.ndarray:
    """Resample the (possibly fractional) box ``(x, y, w, h)`` to ``out_w x out_h``.

    Works on any array whose first two axes are rows and columns.
    Coordinates outside the source are clamped to the edge.
    """
    mode = ResampleMode(mode)
    if out_w < 1 or out_h < 1:
        raise ValueError("output dimensions must be >= 1")
    src_h, src_w = img.shape[:2]
    xi, xw = _axis_taps(x, w, out_w, src_w, mode)
    yi, yw = _axis_taps(y, h, out_h, src_h, mode)
    tmp = _resample_axis(img, 1, xi, xw)
    out = _resample_axis(tmp, 0, yi, yw)
    return clamp(out)


def resize(img: np.ndarray, out_w: int, out_h: int, mode=ResampleMode.BILINEAR) -> np.ndarray:
    h, w = img.shape[:2]
    if (out_w, out_h) == (w, h):
        return img.copy()
    return resample_region(img, 0.0, 0.0, w, h, out_w, out_h, mode)


def shift_channel(plane: np.ndarray, dx: float, dy: float = 0.0) -> np.ndarray:
    """Translate a 2-D plane by ``(dx, dy)`` with bilinear sampling and edge clamping."""
    h, w = plane.shape
    xs = np.clip(np.arange(w) - dx, 0, w - 1)
    ys = np.clip(np.arange(h) - dy, 0, h - 1)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    tx = (xs - x0)[None, :]
    ty = (ys - y0)[:, None]
    top = plane[y0][:, x0] * (1 - tx) + plane[y0][:, x1] * tx
    bottom = plane[y1][:, x0] * (1 - tx) + plane[y1][:, x1] * tx
    return top * (1 - ty) + bottom * ty


# --------------------------------------------------------------------------
# filtering


def make_kernel(weights) -> np.ndarray:
    k = np.array(weights, dtype=np.float64)
    if k.ndim == 1:
        k = k[None, :]
    if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
        raise ValueError(f"kernel must be 2-D with odd sides, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel weights must be finite")
    return k


def convolve(img: np.ndarray, kernel) -> np.ndarray:
    """Per-channel 2-D correlation with reflect-101 borders, clamped to [0, 1]."""
    k = make_kernel(kernel)
    # scipy's "mirror" mode is reflect-101 (d c b | a b c d | c b a)
    out = ndimage.correlate(img, k[:, :, None], mode="mirror")
    return clamp(out)


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    radius = max(1, int(np.ceil(3.0 * sigma)))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma_x: float, sigma_y: float | None = None) -> np.ndarray:
    sigma_y = sigma_x if sigma_y is None else sigma_y
    out = convolve(img, gaussian_kernel_1d(sigma_x)[None, :])
    return convolve(out, gaussian_kernel_1d(sigma_y)[:, None])


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} != {b.shape}")
    mse = float(np.mean((np.asarray(a, dtype=np.float64) - b) ** 2))
    if mse < 1e-10:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(1.0 / mse))
