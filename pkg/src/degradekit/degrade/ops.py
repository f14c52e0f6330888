"""The 18 degradation operations.

Each operation has two halves:

* a *resolver* ``resolve(rng, strength, dims) -> params`` that consumes random
  draws at plan time and returns a plain dict of numbers, and
* an *applier* ``apply(img, params) -> img`` that is a pure function of its
  arguments.

Operations that need per-pixel randomness (noise, glitches, overlays) resolve a
``seed`` parameter; the applier seeds a fresh PCG64 generator from it, so replay
never depends on global RNG state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import imagecore as ic

COMPRESSION = "CompressionResampling"
SENSOR = "SensorNoise"
OPTICAL = "OpticalBlur"
PHOTOMETRIC = "PhotometricDistractor"
CATEGORIES = (COMPRESSION, SENSOR, OPTICAL, PHOTOMETRIC)

SUBSAMPLING_NAMES = ("4:4:4", "4:2:2", "4:2:0")

# upper bound for per-op seeds; stays exact in IEEE doubles so JSON readers in
# other languages keep it intact
_SEED_BOUND = 2**53


def lerp(a: float, b: float, s: float) -> float:
    return a + (b - a) * s


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def nearest_odd(x: float) -> int:
    return 2 * round_half_up((x - 1.0) / 2.0) + 1


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, _SEED_BOUND))


def _rng(params) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(params["seed"])))


# --------------------------------------------------------------------------
# Compression and resampling


def resolve_jpeg_compress(rng, s, dims):
    return {"strength": s, "quality": round_half_up(lerp(90, 5, s)),
            "subsampling": int(rng.integers(0, 3))}


def apply_jpeg_compress(img, p):
    data = ic.encode_image(img, "JPEG", jpeg_quality=int(p["quality"]),
                           jpeg_subsampling=SUBSAMPLING_NAMES[int(p["subsampling"])])
    return ic.decode_image(data)


def resolve_chroma_subsample(rng, s, dims):
    return {"strength": s, "factor": (2, 4)[int(rng.integers(0, 2))]}


def apply_chroma_subsample(img, p):
    f = int(p["factor"])
    h, w = img.shape[:2]
    ycc = ic.to_ycbcr(img)
    chroma = ycc[..., 1:]
    small = ic.resample_region(chroma, 0, 0, w, h, max(1, round_half_up(w / f)),
                               max(1, round_half_up(h / f)), ic.ResampleMode.BILINEAR)
    sh, sw = small.shape[:2]
    ycc[..., 1:] = ic.resample_region(small, 0, 0, sw, sh, w, h, ic.ResampleMode.BILINEAR)
    return ic.from_ycbcr(ycc)


def resolve_color_banding(rng, s, dims):
    return {"strength": s, "levels": round_half_up(lerp(64, 4, s))}


def apply_color_banding(img, p):
    steps = int(p["levels"]) - 1
    if steps < 1:
        raise ValueError("color_banding needs at least 2 levels")
    return ic.clamp(np.floor(img * steps + 0.5) / steps)


def resolve_random_rescale(rng, s, dims):
    w, h = dims
    scale = float(rng.uniform(lerp(0.9, 0.25, s), 1.1))
    return {"strength": s, "scale": scale,
            "down_w": max(1, round_half_up(w * scale)),
            "down_h": max(1, round_half_up(h * scale)),
            "mode_down": int(rng.integers(0, 3)),
            "mode_up": int(rng.integers(0, 3))}


def apply_random_rescale(img, p):
    h, w = img.shape[:2]
    small = ic.resize(img, int(p["down_w"]), int(p["down_h"]), ic.ResampleMode(int(p["mode_down"])))
    return ic.resize(small, w, h, ic.ResampleMode(int(p["mode_up"])))


# --------------------------------------------------------------------------
# Sensor and digital noise


def resolve_gaussian_noise(rng, s, dims):
    return {"strength": s, "sigma": lerp(0.005, 0.12, s), "seed": _seed(rng)}


def apply_gaussian_noise(img, p):
    noise = _rng(p).standard_normal(img.shape) * float(p["sigma"])
    return ic.clamp(img + noise)


def resolve_speckle_noise(rng, s, dims):
    return {"strength": s, "sigma": lerp(0.01, 0.25, s), "seed": _seed(rng)}


def apply_speckle_noise(img, p):
    noise = _rng(p).standard_normal(img.shape) * float(p["sigma"])
    return ic.clamp(img * (1.0 + noise))


def resolve_poisson_noise(rng, s, dims):
    return {"strength": s, "peak": lerp(255, 20, s), "seed": _seed(rng)}


def apply_poisson_noise(img, p):
    peak = float(p["peak"])
    return ic.clamp(_rng(p).poisson(img * peak) / peak)


MACROBLOCK = 16


def resolve_h264_glitch(rng, s, dims):
    return {"strength": s, "block_prob": lerp(0.01, 0.15, s), "seed": _seed(rng)}


def apply_h264_glitch(img, p):
    h, w = img.shape[:2]
    rows, cols = -(-h // MACROBLOCK), -(-w // MACROBLOCK)
    rng = _rng(p)
    # all draws up front so the stream layout does not depend on outcomes
    hit = rng.random((rows, cols)) < float(p["block_prob"])
    use_copy = rng.integers(0, 2, (rows, cols)) == 0
    shifts = rng.integers(-8, 9, (rows, cols))
    out = img.copy()
    for by, bx in zip(*np.nonzero(hit)):
        y0, x0 = by * MACROBLOCK, bx * MACROBLOCK
        y1, x1 = min(y0 + MACROBLOCK, h), min(x0 + MACROBLOCK, w)
        if use_copy[by, bx] and bx > 0:
            out[y0:y1, x0:x1] = img[y0:y1, x0 - MACROBLOCK:x1 - MACROBLOCK]
        else:
            src_x = np.clip(np.arange(x0, x1) - shifts[by, bx], 0, w - 1)
            out[y0:y1, x0:x1] = img[y0:y1][:, src_x]
    return out


# --------------------------------------------------------------------------
# Optical and blur


def resolve_anisotropic_smooth(rng, s, dims):
    hi = lerp(0.8, 5.0, s)
    return {"strength": s, "sigma_x": float(rng.uniform(0.3, hi)),
            "sigma_y": float(rng.uniform(0.3, hi))}


def apply_anisotropic_smooth(img, p):
    return ic.gaussian_blur(img, float(p["sigma_x"]), float(p["sigma_y"]))


def resolve_motion_blur(rng, s, dims):
    return {"strength": s, "length": nearest_odd(lerp(3, 21, s)),
            "angle": float(rng.uniform(0.0, math.pi))}


def motion_kernel(length: int, angle: float) -> np.ndarray:
    """Line kernel of ``length`` pixels at ``angle`` (radians), bilinearly splatted.

    One sample per pixel of length (L points, unit spacing) through the kernel
    center; x runs along columns, y along rows. A horizontal kernel is exactly a
    uniform 1/L row.
    """
    n = int(length)
    if n < 1 or n % 2 == 0:
        raise ValueError("motion blur length must be a positive odd integer")
    k = np.zeros((n, n))
    c = (n - 1) / 2.0
    for t in np.linspace(-c, c, n):
        px, py = c + t * math.cos(angle), c + t * math.sin(angle)
        x0, y0 = math.floor(px), math.floor(py)
        fx, fy = px - x0, py - y0
        for dy, wy in ((0, 1 - fy), (1, fy)):
            for dx, wx in ((0, 1 - fx), (1, fx)):
                yy, xx = y0 + dy, x0 + dx
                if 0 <= yy < n and 0 <= xx < n:
                    k[yy, xx] += wy * wx
    return k / k.sum()


def apply_motion_blur(img, p):
    return ic.convolve(img, motion_kernel(int(p["length"]), float(p["angle"])))


def resolve_chromatic_aberration(rng, s, dims):
    return {"strength": s, "shift": round_half_up(lerp(1, 6, s))}


def apply_chromatic_aberration(img, p):
    d = float(p["shift"])
    out = img.copy()
    out[..., 0] = ic.shift_channel(img[..., 0], d)
    out[..., 2] = ic.shift_channel(img[..., 2], -d)
    return ic.clamp(out)


def resolve_vignette(rng, s, dims):
    return {"strength": s, "amount": lerp(0.1, 0.8, s)}


def apply_vignette(img, p):
    h, w = img.shape[:2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    r_max = math.hypot(cx, cy)
    if r_max == 0:
        return img.copy()
    yy, xx = np.mgrid[0:h, 0:w]
    r2 = ((xx - cx) ** 2 + (yy - cy) ** 2) / r_max**2
    return ic.clamp(img * (1.0 - float(p["amount"]) * r2)[..., None])


# --------------------------------------------------------------------------
# Photometric distortions and distractors


def resolve_color_cast(rng, s, dims):
    a = lerp(0.05, 0.4, s)
    g = rng.uniform(1 - a, 1 + a, 3)
    return {"strength": s, "gain_r": float(g[0]), "gain_g": float(g[1]), "gain_b": float(g[2])}


def apply_color_cast(img, p):
    gains = np.array([p["gain_r"], p["gain_g"], p["gain_b"]], dtype=np.float64)
    return ic.clamp(img * gains)


def resolve_moire(rng, s, dims):
    return {"strength": s, "amplitude": lerp(0.02, 0.2, s),
            "freq_x": float(rng.uniform(0.05, 0.45)),
            "freq_y": float(rng.uniform(0.05, 0.45)),
            "phase": float(rng.uniform(0.0, 2 * math.pi))}


def apply_moire(img, p):
    h, w = img.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    wave = np.sin(2 * math.pi * (float(p["freq_x"]) * xx + float(p["freq_y"]) * yy) + float(p["phase"]))
    return ic.clamp(img * (1.0 + float(p["amplitude"]) * wave)[..., None])


def resolve_text_patch_overlay(rng, s, dims):
    return {"strength": s, "count": round_half_up(lerp(1, 6, s)),
            "area_fraction": lerp(0.01, 0.10, s), "seed": _seed(rng)}


def apply_text_patch_overlay(img, p):
    """Paint opaque rectangles and thin bars; their total area stays within budget.

    Each of the ``count`` shapes gets an equal share of the budget, scaled by a
    draw in [0.25, 1]; sizes are floored so no shape exceeds its share.
    """
    h, w = img.shape[:2]
    rng = _rng(p)
    count = int(p["count"])
    share = float(p["area_fraction"]) * h * w / max(count, 1)
    out = img.copy()
    for _ in range(count):
        is_bar = bool(rng.integers(0, 2))
        color = rng.random(3)
        area = share * rng.uniform(0.25, 1.0)
        aspect = math.exp(rng.uniform(math.log(0.25), math.log(4.0)))
        thickness = int(rng.integers(1, 4))
        horizontal = bool(rng.integers(0, 2))
        u, v = rng.random(2)
        if is_bar:
            length = int(area // thickness)
            rw, rh = (length, thickness) if horizontal else (thickness, length)
        else:
            rw = max(1, int(math.sqrt(area * aspect)))
            rh = int(area // rw)
        rw, rh = min(rw, w), min(rh, h)
        if rw < 1 or rh < 1:
            continue
        x0 = int(u * (w - rw + 1))
        y0 = int(v * (h - rh + 1))
        out[y0:y0 + rh, x0:x0 + rw] = color
    return out


def resolve_pixelate(rng, s, dims):
    return {"strength": s, "block": round_half_up(lerp(2, 12, s))}


def apply_pixelate(img, p):
    b = int(p["block"])
    h, w = img.shape[:2]
    ys, xs = np.arange(0, h, b), np.arange(0, w, b)
    sums = np.add.reduceat(np.add.reduceat(img, ys, axis=0), xs, axis=1)
    counts = np.outer(np.diff(np.append(ys, h)), np.diff(np.append(xs, w)))
    means = sums / counts[..., None]
    return ic.clamp(means[np.arange(h) // b][:, np.arange(w) // b])


def resolve_salt_pepper(rng, s, dims):
    return {"strength": s, "fraction": lerp(0.001, 0.02, s), "seed": _seed(rng)}


def apply_salt_pepper(img, p):
    h, w = img.shape[:2]
    rng = _rng(p)
    n = h * w
    k = min(n, round_half_up(float(p["fraction"]) * n))
    idx = rng.choice(n, size=k, replace=False)
    values = rng.integers(0, 2, size=k).astype(np.float64)
    out = img.reshape(n, 3).copy()
    out[idx] = values[:, None]
    return out.reshape(h, w, 3)


def resolve_gamma_jitter(rng, s, dims):
    g = lerp(0.1, 0.8, s)
    return {"strength": s, "gamma": float(rng.uniform(1.0 / (1.0 + g), 1.0 + g))}


def apply_gamma_jitter(img, p):
    return ic.clamp(np.power(img, float(p["gamma"])))


# --------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class OpDef:
    op_id: str
    category: str
    paper_named: bool
    params: tuple
    resolve: Callable
    apply: Callable


def _def(op_id, category, params, paper_named=True):
    g = globals()
    return OpDef(op_id, category, paper_named, params,
                 g[f"resolve_{op_id}"], g[f"apply_{op_id}"])


OPS = {d.op_id: d for d in (
    _def("jpeg_compress", COMPRESSION, ("quality", "subsampling")),
    _def("chroma_subsample", COMPRESSION, ("factor",)),
    _def("color_banding", COMPRESSION, ("levels",)),
    _def("random_rescale", COMPRESSION, ("scale", "down_w", "down_h", "mode_down", "mode_up")),
    _def("gaussian_noise", SENSOR, ("sigma", "seed")),
    _def("speckle_noise", SENSOR, ("sigma", "seed")),
    _def("poisson_noise", SENSOR, ("peak", "seed")),
    _def("h264_glitch", SENSOR, ("block_prob", "seed")),
    _def("anisotropic_smooth", OPTICAL, ("sigma_x", "sigma_y")),
    _def("motion_blur", OPTICAL, ("length", "angle")),
    _def("chromatic_aberration", OPTICAL, ("shift",)),
    _def("vignette", OPTICAL, ("amount",)),
    _def("color_cast", PHOTOMETRIC, ("gain_r", "gain_g", "gain_b")),
    _def("moire", PHOTOMETRIC, ("amplitude", "freq_x", "freq_y", "phase")),
    _def("text_patch_overlay", PHOTOMETRIC, ("count", "area_fraction", "seed")),
    # catalog fillers, not named in the source method
    _def("pixelate", COMPRESSION, ("block",), paper_named=False),
    _def("salt_pepper", SENSOR, ("fraction", "seed"), paper_named=False),
    _def("gamma_jitter", PHOTOMETRIC, ("gamma",), paper_named=False),
)}
