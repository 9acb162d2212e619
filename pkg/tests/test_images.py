import math

import numpy as np
import pytest

from sappi.adders import AdderKind
from sappi.errors import DimensionMismatchError, FormatError
from sappi.images import (
    BLUR_KERNEL,
    GrayImage,
    RgbImage,
    gaussian_blur,
    gray_from_array,
    image_add,
    load_image,
    mssim,
    psnr,
    quality_report,
    report_json,
    rgb_from_array,
    rgb_to_gray,
    save_image,
)
from sappi.rca import MulConfig, RcaConfig

EXACT8 = RcaConfig(8, 0)


def reference_blur(data: np.ndarray) -> np.ndarray:
    """Plain integer convolution oracle: floor(sum(kernel * window) / 16)."""
    padded = np.pad(data.astype(np.int64), 1, mode="edge")
    out = np.zeros_like(data, dtype=np.int64)
    kernel = np.asarray(BLUR_KERNEL)
    for y in range(data.shape[0]):
        for x in range(data.shape[1]):
            out[y, x] = (kernel * padded[y : y + 3, x : x + 3]).sum() >> 4
    return np.clip(out, 0, 255).astype(np.uint8)


# ---------------------------------------------------------------- file format

def test_pgm_round_trip(tmp_path):
    image = gray_from_array(np.array([[0, 128], [255, 7]], dtype=np.uint8))
    path = tmp_path / "t.pgm"
    save_image(image, path)
    loaded = load_image(path)
    assert isinstance(loaded, GrayImage)
    assert loaded.width == 2 and loaded.height == 2
    assert np.array_equal(loaded.data, image.data)


def test_ppm_round_trip(tmp_path):
    data = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
    path = tmp_path / "t.ppm"
    save_image(rgb_from_array(data), path)
    loaded = load_image(path)
    assert isinstance(loaded, RgbImage)
    assert np.array_equal(loaded.data, data)


def test_header_parser_offsets():
    from sappi.images import _read_header

    blob = b"P5\n2 2\n255\n" + bytes([0, 128, 255, 7])
    tokens, offset = _read_header(blob)
    assert tokens == [b"P5", b"2", b"2", b"255"]
    assert blob[offset:] == bytes([0, 128, 255, 7])


def test_comments_in_header(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 1\n# another\n255\n\x01\x02")
    loaded = load_image(path)
    assert np.array_equal(loaded.data, np.array([[1, 2]], dtype=np.uint8))


@pytest.mark.parametrize(
    "blob",
    [
        b"P4\n2 2\n255\n\x00\x00\x00\x00",      # wrong magic
        b"P6\n2 2\n65535\n" + b"\x00" * 24,     # 16-bit maxval unsupported
        b"P5\n2 2\n255\n\x00\x00",              # truncated payload
        b"P5\n2\n",                             # truncated header
        b"P5\nx y\n255\n\x00",                  # non-integer dimensions
    ],
)
def test_malformed_files_rejected(tmp_path, blob):
    path = tmp_path / "bad.pgm"
    path.write_bytes(blob)
    with pytest.raises(FormatError):
        load_image(path)


# ---------------------------------------------------------------- image add

def test_image_add_exact_is_integer_mean():
    a = gray_from_array(np.array([[100, 0], [255, 3]], dtype=np.uint8))
    b = gray_from_array(np.array([[50, 0], [255, 4]], dtype=np.uint8))
    out, gains = image_add(EXACT8, a, b)
    assert np.array_equal(out.data, np.array([[75, 0], [255, 3]], dtype=np.uint8))
    assert gains.additions == 4


def test_image_add_identity_on_identical_inputs():
    data = np.arange(64, dtype=np.uint8).reshape(8, 8)
    out, _ = image_add(EXACT8, gray_from_array(data), gray_from_array(data))
    assert np.array_equal(out.data, data)


def test_image_add_approximate_zero_pixels():
    # approximate sum of (0, 0) at 4/8 is 15, halved to 7
    zeros = gray_from_array(np.zeros((4, 4), dtype=np.uint8))
    out, _ = image_add(RcaConfig(8, 4, AdderKind.SAPPI1), zeros, zeros)
    assert (out.data == 7).all()


def test_image_add_rejects_mismatched_shapes():
    a = gray_from_array(np.zeros((4, 4), dtype=np.uint8))
    b = gray_from_array(np.zeros((4, 5), dtype=np.uint8))
    with pytest.raises(DimensionMismatchError):
        image_add(EXACT8, a, b)


# ---------------------------------------------------------------- grayscale

def test_grayscale_exact_averages_channels():
    rgb = rgb_from_array(np.array([[[30, 60, 90], [7, 7, 7]]], dtype=np.uint8))
    out, gains = rgb_to_gray(EXACT8, rgb)
    assert np.array_equal(out.data, np.array([[60, 7]], dtype=np.uint8))
    assert gains.additions == 4  # two additions per pixel


def test_grayscale_uniform_gray_is_preserved():
    g = np.full((5, 5, 3), 123, dtype=np.uint8)
    out, _ = rgb_to_gray(EXACT8, rgb_from_array(g))
    assert (out.data == 123).all()


def test_grayscale_approximate_black_pixels():
    # two chained approximate additions of zeros, then exact /3
    rgb = rgb_from_array(np.zeros((2, 2, 3), dtype=np.uint8))
    cfg = RcaConfig(8, 4, AdderKind.SAPPI2)
    out, _ = rgb_to_gray(cfg, rgb)
    # oracle: add8(0,0) = 15, then the widened add of (15, 0) at 4/8, /3
    from tests.test_rca import oracle_add

    t2 = oracle_add(RcaConfig(9, 4, AdderKind.SAPPI2), 15, 0)
    assert (out.data == min(t2 // 3, 255)).all()


# ---------------------------------------------------------------- blur

def test_blur_exact_matches_integer_reference():
    rng = np.random.default_rng(42)
    data = rng.integers(0, 256, size=(16, 16)).astype(np.uint8)
    out, _ = gaussian_blur(MulConfig(RcaConfig(20, 0)), gray_from_array(data))
    assert np.array_equal(out.data, reference_blur(data))


def test_blur_constant_image_is_identity():
    data = np.full((10, 12), 77, dtype=np.uint8)
    out, _ = gaussian_blur(MulConfig(RcaConfig(20, 0)), gray_from_array(data))
    assert np.array_equal(out.data, data)


def test_blur_impulse_reproduces_kernel():
    data = np.zeros((7, 7), dtype=np.uint8)
    data[3, 3] = 16
    out, _ = gaussian_blur(MulConfig(RcaConfig(20, 0)), gray_from_array(data))
    assert np.array_equal(out.data[2:5, 2:5], np.asarray(BLUR_KERNEL, dtype=np.uint8))
    assert out.data.sum() == np.asarray(BLUR_KERNEL).sum()


def test_blur_approximate_deviation_bounded():
    data = np.zeros((7, 7), dtype=np.uint8)
    data[3, 3] = 16
    exact, _ = gaussian_blur(MulConfig(RcaConfig(20, 0)), gray_from_array(data))
    for kind in (AdderKind.SAPPI1, AdderKind.SAPPI2):
        out, gains = gaussian_blur(MulConfig(RcaConfig(20, 8, kind)), gray_from_array(data))
        per_add_bound = (1 << 9) - 1
        adds_per_pixel = gains.additions // data.size
        bound = (per_add_bound * adds_per_pixel) >> 8  # output is shifted by 8
        assert np.abs(out.data.astype(int) - exact.data.astype(int)).max() <= bound + 1


def test_blur_addition_count():
    data = np.zeros((5, 6), dtype=np.uint8)
    _, gains = gaussian_blur(MulConfig(RcaConfig(20, 0)), gray_from_array(data))
    # 9 single-set-bit coefficient products plus 8 accumulations per pixel
    assert gains.additions == 17 * data.size


# ---------------------------------------------------------------- psnr/mssim

def test_psnr_identical_is_infinite():
    img = gray_from_array(np.arange(64, dtype=np.uint8).reshape(8, 8))
    assert math.isinf(psnr(img, img))


def test_psnr_known_values():
    zeros = gray_from_array(np.zeros((8, 8), dtype=np.uint8))
    ones = gray_from_array(np.ones((8, 8), dtype=np.uint8))
    assert psnr(zeros, ones) == pytest.approx(10 * math.log10(65025 / 1), abs=1e-9)
    assert psnr(zeros, ones) == pytest.approx(48.13, abs=0.01)
    base = np.random.default_rng(1).integers(0, 224, size=(16, 16)).astype(np.uint8)
    offset = (base + 16).astype(np.uint8)
    assert psnr(gray_from_array(base), gray_from_array(offset)) == pytest.approx(24.05, abs=0.01)


def test_mssim_identical_is_one():
    img = gray_from_array(np.random.default_rng(3).integers(0, 256, size=(12, 12)).astype(np.uint8))
    assert mssim(img, img) == pytest.approx(1.0)


def test_mssim_constant_images():
    img = gray_from_array(np.full((9, 9), 128, dtype=np.uint8))
    assert mssim(img, img) == pytest.approx(1.0)


def test_mssim_inverted_high_variance_image_scores_low():
    data = np.random.default_rng(9).integers(0, 256, size=(32, 32)).astype(np.uint8)
    inverted = (255 - data).astype(np.uint8)
    value = mssim(gray_from_array(data), gray_from_array(inverted))
    assert -1.0 <= value < 0.5


def test_mssim_matches_direct_window_loop():
    rng = np.random.default_rng(11)
    x = rng.integers(0, 256, size=(12, 14)).astype(np.uint8)
    y = rng.integers(0, 256, size=(12, 14)).astype(np.uint8)
    c1, c2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2
    values = []
    xf, yf = x.astype(float), y.astype(float)
    for row in range(12 - 8 + 1):
        for col in range(14 - 8 + 1):
            wx = xf[row : row + 8, col : col + 8]
            wy = yf[row : row + 8, col : col + 8]
            mx, my = wx.mean(), wy.mean()
            vx, vy = wx.var(), wy.var()
            cov = ((wx - mx) * (wy - my)).mean()
            values.append(
                ((2 * mx * my + c1) * (2 * cov + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    expected = float(np.mean(values))
    assert mssim(gray_from_array(x), gray_from_array(y)) == pytest.approx(expected, abs=1e-12)


def test_mssim_rejects_tiny_images():
    img = gray_from_array(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(DimensionMismatchError):
        mssim(img, img)


def test_quality_report_json_contract():
    a = gray_from_array(np.zeros((8, 8), dtype=np.uint8))
    cfg = RcaConfig(8, 4, AdderKind.SAPPI1)
    out, gains = image_add(cfg, a, a)
    report = quality_report("image-add", cfg, a, out, gains)
    payload = report_json(report)
    import json

    decoded = json.loads(payload)
    assert set(decoded) == {
        "application", "kind", "n", "k", "psnr_db", "mssim",
        "additions", "energy_saved_nj", "steps_saved",
    }
    assert decoded["kind"] == "sappi1" and decoded["k"] == 4


def test_quality_report_infinite_psnr_serializes_as_null():
    a = gray_from_array(np.zeros((8, 8), dtype=np.uint8))
    cfg = RcaConfig(8, 0)
    out, gains = image_add(cfg, a, a)
    report = quality_report("image-add", cfg, a, out, gains)
    import json

    assert json.loads(report_json(report))["psnr_db"] is None


# ------------------------------------------------- bundled natural fixtures

def test_bundled_fixtures_load(fixtures_dir):
    a = load_image(fixtures_dir / "natural_a_256.pgm")
    assert isinstance(a, GrayImage) and a.width == 256 and a.height == 256
    rgb = load_image(fixtures_dir / "natural_rgb_192x144.ppm")
    assert isinstance(rgb, RgbImage) and rgb.width == 192 and rgb.height == 144


def test_psnr_ladder_on_natural_fixture(fixtures_dir):
    a = load_image(fixtures_dir / "natural_a_256.pgm")
    b = load_image(fixtures_dir / "natural_b_256.pgm")
    reference, _ = image_add(EXACT8, a, b)
    for kind in (AdderKind.SAPPI1, AdderKind.SAPPI2):
        previous = math.inf
        for k in (1, 2, 3, 4, 5):
            out, _ = image_add(RcaConfig(8, k, kind), a, b)
            value = psnr(reference, out)
            assert value <= previous
            previous = value
        assert psnr(reference, image_add(RcaConfig(8, 4, kind), a, b)[0]) > 30.0
