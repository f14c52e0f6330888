import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from degradekit import imagecore as ic
from degradekit.errors import DimensionMismatch, InvalidQuality, MalformedFile, UnsupportedFormat


def png_bytes(arr, mode="RGB"):
    buf = io.BytesIO()
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode=mode).save(buf, format="PNG")
    return buf.getvalue()


images = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3)),
                elements=st.floats(0.0, 1.0, allow_nan=False))


# --- codecs -------------------------------------------------------------------


def test_decode_white_and_black():
    assert np.array_equal(ic.decode_image(png_bytes([[[255, 255, 255]]])), np.ones((1, 1, 3)))
    assert np.array_equal(ic.decode_image(png_bytes([[[0, 0, 0]]])), np.zeros((1, 1, 3)))


def test_decode_maps_v_over_255():
    arr = np.zeros((2, 2, 3), dtype=np.uint8)
    arr[0, 0] = (128, 64, 32)
    img = ic.decode_image(png_bytes(arr))
    assert img[0, 0].tolist() == [128 / 255, 64 / 255, 32 / 255]


def test_decode_grayscale_and_alpha():
    gray = ic.decode_image(png_bytes([[7, 200]], mode="L"))
    assert gray.shape == (1, 2, 3)
    assert np.all(gray[0, 1] == 200 / 255)
    rgba = np.array([[[10, 20, 30, 0]]], dtype=np.uint8)
    img = ic.decode_image(png_bytes(rgba, mode="RGBA"))
    assert img[0, 0].tolist() == [10 / 255, 20 / 255, 30 / 255]


def test_decode_errors():
    with pytest.raises(UnsupportedFormat):
        ic.decode_image(b"GIF89a....")
    with pytest.raises(MalformedFile):
        ic.decode_image(ic.PNG_SIGNATURE + b"garbage")
    with pytest.raises(MalformedFile):
        ic.decode_image(b"\xff\xd8\xff\xe0 not a jpeg")


def test_png_round_trip_zeros():
    img = np.zeros((4, 4, 3))
    assert np.array_equal(ic.decode_image(ic.encode_image(img, "PNG")), img)


@settings(max_examples=50, deadline=None)
@given(images)
def test_png_round_trip_exact_at_8bit(img):
    quantized = ic.from_uint8(ic.to_uint8(img))
    assert np.array_equal(ic.decode_image(ic.encode_image(img, "PNG")), quantized)


def test_jpeg_quality_5_is_lossy(natural_image):
    out = ic.decode_image(ic.encode_image(natural_image, "JPEG", 5, "4:2:0"))
    assert np.mean(np.abs(out - natural_image)) > 0


def test_jpeg_mid_gray_survives():
    img = np.full((16, 16, 3), 0.5)
    for sub in ic.SUBSAMPLING_CODES:
        out = ic.decode_image(ic.encode_image(img, "JPEG", 90, sub))
        assert np.max(np.abs(out - img)) <= 2 / 255 + 1e-12


def test_jpeg_quality_monotone(natural_image):
    errors = [np.mean(np.abs(ic.decode_image(ic.encode_image(natural_image, "JPEG", q)) - natural_image))
              for q in (10, 40, 70, 95)]
    assert errors == sorted(errors, reverse=True)


def test_jpeg_subsampling_written_to_file(natural_image):
    from PIL import JpegImagePlugin
    for name, code in ic.SUBSAMPLING_CODES.items():
        data = ic.encode_image(natural_image, "JPEG", 75, name)
        with Image.open(io.BytesIO(data)) as im:
            assert JpegImagePlugin.get_sampling(im) == code
            assert not im.info.get("progressive")


@pytest.mark.parametrize("quality", [0, 101, -3, 50.5])
def test_invalid_quality(quality):
    with pytest.raises(InvalidQuality):
        ic.encode_image(np.zeros((2, 2, 3)), "JPEG", quality)


def test_png_ignores_quality():
    ic.encode_image(np.zeros((2, 2, 3)), "PNG", jpeg_quality=0)


# --- color --------------------------------------------------------------------


def test_ycbcr_known_values():
    px = np.array([[[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]])
    ycc = ic.to_ycbcr(px)
    assert ycc[0, 0] == pytest.approx([1.0, 0.5, 0.5], abs=1e-12)
    assert ycc[0, 1] == pytest.approx([0.0, 0.5, 0.5], abs=1e-12)
    # direct arithmetic: Cr = 0.5 + 0.701 / 1.402, Cb = 0.5 - 0.299 / 1.772
    assert ycc[0, 2] == pytest.approx([0.299, 0.5 - 0.299 / 1.772, 0.5 + 0.701 / 1.402], abs=1e-12)
    assert ycc[0, 2, 1] == pytest.approx(0.33126, abs=1e-5)
    assert ycc[0, 2, 2] == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(images)
def test_ycbcr_round_trip(img):
    back = ic.from_ycbcr(ic.to_ycbcr(img), clip=False)
    assert np.max(np.abs(back - img)) <= 1e-6


# --- resize -------------------------------------------------------------------


def brute_resize(img, out_w, out_h, mode):
    """Per-pixel oracle written straight from the half-pixel-center definition."""
    h, w = img.shape[:2]

    def taps(o, n_out, n_src):
        src = (o + 0.5) * n_src / n_out - 0.5
        if mode == ic.ResampleMode.NEAREST:
            return [(min(max(math.floor(src + 0.5), 0), n_src - 1), 1.0)]
        i0 = math.floor(src)
        t = src - i0
        if mode == ic.ResampleMode.BILINEAR:
            pairs = [(i0, 1 - t), (i0 + 1, t)]
        else:
            def cr(d):
                d = abs(d)
                if d <= 1:
                    return 1.5 * d**3 - 2.5 * d**2 + 1
                if d < 2:
                    return -0.5 * d**3 + 2.5 * d**2 - 4 * d + 2
                return 0.0
            pairs = [(i0 + k, cr(t - k)) for k in (-1, 0, 1, 2)]
            total = sum(wt for _, wt in pairs)
            pairs = [(i, wt / total) for i, wt in pairs]
        return [(min(max(i, 0), n_src - 1), wt) for i, wt in pairs]

    out = np.zeros((out_h, out_w, 3))
    for oy in range(out_h):
        for ox in range(out_w):
            acc = np.zeros(3)
            for iy, wy in taps(oy, out_h, h):
                for ix, wx in taps(ox, out_w, w):
                    acc += wy * wx * img[iy, ix]
            out[oy, ox] = acc
    return np.clip(out, 0, 1)


@pytest.mark.parametrize("mode", list(ic.ResampleMode))
@pytest.mark.parametrize("dims", [(5, 7), (13, 3), (1, 1), (16, 9)])
def test_resize_matches_brute_force(mode, dims, rng):
    img = rng.random((6, 8, 3))
    assert np.allclose(ic.resize(img, *dims, mode=mode), brute_resize(img, *dims, mode), atol=1e-12)


@pytest.mark.parametrize("mode", list(ic.ResampleMode))
def test_identity_resize_bit_identical(mode, rng):
    img = rng.random((9, 11, 3))
    assert np.array_equal(ic.resize(img, 11, 9, mode), img)
    # the resampling path itself (not just the shortcut) is exact at unit scale
    assert np.array_equal(ic.resample_region(img, 0, 0, 11, 9, 11, 9, mode), img)


def test_checkerboard_bilinear_to_one_pixel():
    board = np.array([[0.0, 1.0], [1.0, 0.0]])[..., None].repeat(3, axis=2)
    assert ic.resize(board, 1, 1, ic.ResampleMode.BILINEAR)[0, 0].tolist() == [0.5, 0.5, 0.5]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 20), st.integers(2, 20), st.floats(0.1, 4.0), st.floats(0.1, 4.0),
       st.sampled_from(list(ic.ResampleMode)), st.floats(0.0, 1.0))
def test_resize_constant(w, h, sx, sy, mode, value):
    img = np.full((h, w, 3), value)
    out = ic.resize(img, max(1, round(w * sx)), max(1, round(h * sy)), mode)
    assert np.allclose(out, value, atol=1e-12, rtol=0)


@settings(max_examples=40, deadline=None)
@given(images, st.integers(1, 15), st.integers(1, 15), st.sampled_from(list(ic.ResampleMode)))
def test_resize_stays_in_range(img, w, h, mode):
    out = ic.resize(img, w, h, mode)
    assert out.shape == (h, w, 3)
    assert out.min() >= 0 and out.max() <= 1


# --- convolve -----------------------------------------------------------------


def brute_correlate(img, k):
    """Loop oracle with reflect-101 indexing."""
    h, w = img.shape[:2]
    kh, kw = k.shape
    ry, rx = kh // 2, kw // 2

    def refl(i, n):
        if n == 1:
            return 0
        period = 2 * (n - 1)
        i = abs(i) % period
        return period - i if i >= n else i

    out = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            for dy in range(kh):
                for dx in range(kw):
                    out[y, x] += k[dy, dx] * img[refl(y + dy - ry, h), refl(x + dx - rx, w)]
    return np.clip(out, 0, 1)


def test_convolve_matches_brute_force(rng):
    img = rng.random((7, 6, 3))
    k = rng.random((3, 5)) - 0.3
    assert np.allclose(ic.convolve(img, k), brute_correlate(img, k), atol=1e-12)


def test_convolve_box_on_center_impulse():
    img = np.zeros((3, 3, 3))
    img[1, 1] = 1.0
    out = ic.convolve(img, np.full((3, 3), 1 / 9))
    assert out[1, 1] == pytest.approx([1 / 9] * 3, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(images)
def test_convolve_delta_is_identity(img):
    assert np.array_equal(ic.convolve(img, [[1.0]]), img)
    delta = np.zeros((3, 5))
    delta[1, 2] = 1.0
    assert np.array_equal(ic.convolve(img, delta), img)


def test_convolve_constant_with_normalized_kernel(rng):
    img = np.full((8, 8, 3), 0.37)
    k = rng.random((5, 3))
    assert np.allclose(ic.convolve(img, k / k.sum()), 0.37, atol=1e-12)


def test_even_kernel_rejected():
    with pytest.raises(ValueError):
        ic.convolve(np.zeros((3, 3, 3)), np.ones((2, 3)))


# --- psnr ---------------------------------------------------------------------


def test_psnr_values(rng):
    img = rng.random((4, 4, 3))
    assert ic.psnr(img, img) == 99.0
    assert ic.psnr(np.zeros((2, 2, 3)), np.ones((2, 2, 3))) == 0.0
    assert ic.psnr(np.zeros((2, 2, 3)), np.full((2, 2, 3), 0.5)) == pytest.approx(10 * math.log10(4))
    assert ic.psnr(np.zeros((2, 2, 3)), np.full((2, 2, 3), 0.5)) == pytest.approx(6.0206, abs=1e-4)
    with pytest.raises(DimensionMismatch):
        ic.psnr(np.zeros((2, 2, 3)), np.zeros((3, 2, 3)))
