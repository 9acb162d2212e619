"""Image applications on approximate arithmetic, plus PSNR/MSSIM scoring.

Images are 8-bit, stored as numpy arrays: grayscale (h, w), RGB (h, w, 3).
File I/O is binary netpbm only (PGM P5 / PPM P6, maxval 255).

Only additions run on the approximate hardware model; normalizations
(halving, division by 3, the blur's power-of-two divisor) are exact integer
operations, and overflow after normalization is clamped to [0, 255].
"""

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .costs import GainReport, application_gains
from .errors import DimensionMismatchError, FormatError, RangeError
from .rca import MulConfig, RcaConfig, rca_add_array, shift_add_multiply_array


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    data: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        if self.data.shape != (self.height, self.width) or self.data.dtype != np.uint8:
            raise DimensionMismatchError("grayscale data must be uint8 with shape (height, width)")


@dataclass(frozen=True)
class RgbImage:
    width: int
    height: int
    data: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3) or self.data.dtype != np.uint8:
            raise DimensionMismatchError("rgb data must be uint8 with shape (height, width, 3)")


def gray_from_array(data: np.ndarray) -> GrayImage:
    data = np.asarray(data, dtype=np.uint8)
    return GrayImage(width=data.shape[1], height=data.shape[0], data=data)


def rgb_from_array(data: np.ndarray) -> RgbImage:
    data = np.asarray(data, dtype=np.uint8)
    return RgbImage(width=data.shape[1], height=data.shape[0], data=data)


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_header(blob: bytes):
    # magic, width, height, maxval; '#' comments may appear between tokens
    pos = 0
    tokens = []
    for _ in range(4):
        m = _TOKEN.match(blob, pos)
        if not m:
            raise FormatError("truncated netpbm header")
        tokens.append(m.group(1))
        pos = m.end()
    if pos >= len(blob) or blob[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise FormatError("netpbm header must end with single whitespace")
    return tokens, pos + 1


def load_image(path) -> GrayImage | RgbImage:
    """Read a binary PGM (P5) or PPM (P6) file with maxval 255."""
    with open(path, "rb") as fh:
        blob = fh.read()
    (magic, *dims), payload_at = _read_header(blob)
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported netpbm magic {magic!r}; only binary P5/P6 are accepted")
    try:
        width, height, maxval = (int(v) for v in dims)
    except ValueError:
        raise FormatError("netpbm dimensions must be decimal integers") from None
    if width < 1 or height < 1:
        raise FormatError("image dimensions must be positive")
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    payload = blob[payload_at : payload_at + expected]
    if len(payload) != expected:
        raise FormatError(f"payload truncated: expected {expected} bytes, got {len(payload)}")
    data = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return GrayImage(width, height, data.reshape(height, width))
    return RgbImage(width, height, data.reshape(height, width, 3))


def save_image(image: GrayImage | RgbImage, path) -> None:
    magic = b"P5" if isinstance(image, GrayImage) else b"P6"
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (image.width, image.height))
        fh.write(image.data.tobytes())


def _require_same_shape(a: GrayImage, b: GrayImage) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def image_add(cfg: RcaConfig, img_a: GrayImage, img_b: GrayImage) -> tuple[GrayImage, GainReport]:
    """Pixelwise (a + b) / 2 with the addition on the configured 8-bit adder.

    The full 9-bit sum is kept before halving, so no wraparound occurs.
    """
    if cfg.n != 8:
        raise RangeError("image addition runs on an 8-bit adder")
    _require_same_shape(img_a, img_b)
    sums = rca_add_array(cfg, img_a.data.astype(np.int64), img_b.data.astype(np.int64))
    out = np.clip(sums >> 1, 0, 255).astype(np.uint8)
    additions = img_a.width * img_a.height
    gains = application_gains("image-add", additions, cfg.kind, cfg.n, cfg.k)
    return GrayImage(img_a.width, img_a.height, out), gains


def rgb_to_gray(cfg: RcaConfig, img: RgbImage) -> tuple[GrayImage, GainReport]:
    """Average the three channels: two chained additions, then exact /3.

    The first addition is 8-bit; the second takes the 9-bit intermediate, so
    it runs on a one-bit-wider adder with the same kind and degree.
    """
    if cfg.n != 8:
        raise RangeError("grayscale conversion starts from an 8-bit adder")
    wide = RcaConfig(n=9, k=cfg.k, kind=cfg.kind)
    r = img.data[:, :, 0].astype(np.int64)
    g = img.data[:, :, 1].astype(np.int64)
    b = img.data[:, :, 2].astype(np.int64)
    t1 = rca_add_array(cfg, r, g)
    t2 = rca_add_array(wide, t1, b)
    out = np.clip(t2 // 3, 0, 255).astype(np.uint8)
    pixels = img.width * img.height
    gains = application_gains("grayscale", 2 * pixels, cfg.kind, cfg.n, cfg.k)
    return GrayImage(img.width, img.height, out), gains


#: binomial 3x3 kernel with divisor 16
BLUR_KERNEL = ((1, 2, 1), (2, 4, 2), (1, 2, 1))
BLUR_DIVISOR_BITS = 4

#: kernel coefficients are applied in fixed point, scaled by 2**4, so the
#: multiplier's products sit 4 bits above the heavily approximated low bits;
#: exact mode is bit-identical to floor(conv / 16) either way
BLUR_COEFF_SCALE_BITS = 4


def gaussian_blur(
    cfg: MulConfig,
    img: GrayImage,
    kernel=BLUR_KERNEL,
    divisor_bits: int = BLUR_DIVISOR_BITS,
    coeff_scale_bits: int = BLUR_COEFF_SCALE_BITS,
) -> tuple[GrayImage, GainReport]:
    """Convolve with the 3x3 kernel via the shift-and-add multiplier.

    Each tap's product and the running accumulation both execute on the
    configured wide adder; borders are handled by edge replication and the
    final divide is an exact shift with clamping.
    """
    coeffs = [[c << coeff_scale_bits for c in row] for row in kernel]
    peak = max(max(row) for row in coeffs)
    if peak >= 1 << cfg.b_bits:
        raise RangeError("scaled kernel coefficient exceeds the multiplier operand width")
    padded = np.pad(img.data.astype(np.int64), 1, mode="edge")
    h, w = img.height, img.width
    acc = None
    additions = 0
    for dy in range(3):
        for dx in range(3):
            tap = padded[dy : dy + h, dx : dx + w]
            prod, cost = shift_add_multiply_array(cfg, tap, coeffs[dy][dx])
            additions += cost.additions
            if acc is None:
                acc = prod
            else:
                acc = rca_add_array(cfg.rca, acc, prod)
                additions += acc.size
    out = np.clip(acc >> (divisor_bits + coeff_scale_bits), 0, 255).astype(np.uint8)
    gains = application_gains("blur", additions, cfg.rca.kind, cfg.rca.n, cfg.rca.k)
    return GrayImage(w, h, out), gains


def psnr(reference: GrayImage, test: GrayImage) -> float:
    """10*log10(255^2 / MSE); infinite when the images are identical."""
    _require_same_shape(reference, test)
    diff = reference.data.astype(np.float64) - test.data.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


SSIM_WINDOW = 8
_SSIM_C1 = (0.01 * 255.0) ** 2
_SSIM_C2 = (0.03 * 255.0) ** 2


def _window_means(x: np.ndarray, w: int) -> np.ndarray:
    # sliding w*w window means via an integral image
    integral = np.zeros((x.shape[0] + 1, x.shape[1] + 1), dtype=np.float64)
    integral[1:, 1:] = np.cumsum(np.cumsum(x, axis=0), axis=1)
    sums = (
        integral[w:, w:] - integral[:-w, w:] - integral[w:, :-w] + integral[:-w, :-w]
    )
    return sums / (w * w)


def mssim(reference: GrayImage, test: GrayImage, window: int = SSIM_WINDOW) -> float:
    """Mean SSIM over sliding ``window``-square patches with stride 1.

    Uniform windows, population moments, and the standard stabilizing
    constants C1 = (0.01*255)^2 and C2 = (0.03*255)^2.
    """
    _require_same_shape(reference, test)
    if reference.width < window or reference.height < window:
        raise DimensionMismatchError(f"images must be at least {window}x{window} for MSSIM")
    x = reference.data.astype(np.float64)
    y = test.data.astype(np.float64)
    mu_x = _window_means(x, window)
    mu_y = _window_means(y, window)
    var_x = _window_means(x * x, window) - mu_x * mu_x
    var_y = _window_means(y * y, window) - mu_y * mu_y
    cov = _window_means(x * y, window) - mu_x * mu_y
    ssim_map = ((2 * mu_x * mu_y + _SSIM_C1) * (2 * cov + _SSIM_C2)) / (
        (mu_x * mu_x + mu_y * mu_y + _SSIM_C1) * (var_x + var_y + _SSIM_C2)
    )
    return float(ssim_map.mean())


@dataclass(frozen=True)
class QualityReport:
    application: str
    config: RcaConfig
    psnr_db: float
    mssim: float
    gains: GainReport

    def to_dict(self) -> dict:
        return {
            "application": self.application,
            "kind": str(self.config.kind),
            "n": self.config.n,
            "k": self.config.k,
            # JSON has no Infinity literal; identical images serialize as null
            "psnr_db": None if math.isinf(self.psnr_db) else self.psnr_db,
            "mssim": self.mssim,
            "additions": self.gains.additions,
            "energy_saved_nj": self.gains.energy_saved_nj,
            "steps_saved": self.gains.steps_saved,
        }


def quality_report(application: str, cfg: RcaConfig, reference: GrayImage,
                   test: GrayImage, gains: GainReport) -> QualityReport:
    return QualityReport(
        application=application,
        config=cfg,
        psnr_db=psnr(reference, test),
        mssim=mssim(reference, test),
        gains=gains,
    )


def report_json(report: QualityReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
