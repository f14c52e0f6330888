"""Raster basics: decoding, color conversion, resampling and PSNR.

    python demos/imagecore_tour.py
"""

import numpy as np
from skimage import data

from degradekit import imagecore as ic

img = ic.from_uint8(data.chelsea())
print("raster", img.shape, img.dtype, "range", img.min(), img.max())

# 8-bit only appears at the codec boundary
png = ic.encode_image(img, "PNG")
assert np.array_equal(ic.decode_image(png), img)
for q in (95, 75, 40):
    jpg = ic.decode_image(ic.encode_image(img, "JPEG", jpeg_quality=q))
    print(f"JPEG q={q:3d}  PSNR {ic.psnr(img, jpg):6.2f} dB")

ycc = ic.to_ycbcr(img)
back = ic.from_ycbcr(ycc)
print("YCbCr round-trip max error", float(np.abs(back - img).max()))

for mode in ic.ResampleMode:
    small = ic.resize(img, 113, 75, mode)
    up = ic.resize(small, img.shape[1], img.shape[0], ic.ResampleMode.BICUBIC)
    print(f"{mode.name:8s} down/up  PSNR {ic.psnr(img, up):6.2f} dB")

blurred = ic.gaussian_blur(img, 2.0)
print("gaussian sigma=2  PSNR", round(ic.psnr(img, blurred), 2))
