"""Regenerates every committed test fixture.

Run from the repository root:  python tests/fixtures/gen_fixtures.py

Intentionally self-contained: the netpbm writer, the weights-file writer, and
the integer inference used to freeze the reference predictions are all local
to this script, so the fixtures stay independent of the package they test.
The synthetic sources in tests/synth.py are integer-hash based and reproduce
byte-identically everywhere.
"""

import json
import struct
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from synth import digit_like_images, digit_like_labels, fixture_weights  # noqa: E402

FIXTURE_IMAGE_COUNT = 1000


def write_pgm(path: Path, data: np.ndarray) -> None:
    height, width = data.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(data.astype(np.uint8).tobytes())


def write_ppm(path: Path, data: np.ndarray) -> None:
    height, width, _ = data.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (width, height))
        fh.write(data.astype(np.uint8).tobytes())


def natural_texture(width: int, height: int, seed: int) -> np.ndarray:
    """Natural-image stand-in: smooth low-frequency shapes plus fine texture."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    img = (
        118.0
        + 85.0 * np.sin(x / 23.0) * np.cos(y / 31.0)
        + 42.0 * np.sin((x + 0.7 * y) / 11.0)
        + 18.0 * np.cos((x - y) / 5.0)
        + 22.0 * rng.standard_normal((height, width))
    )
    return np.clip(img, 0, 255).astype(np.uint8)


def gradient(size: int) -> np.ndarray:
    ramp = np.linspace(0, 255, size)
    return np.clip(ramp[None, :] * 0.5 + ramp[:, None] * 0.5, 0, 255).astype(np.uint8)


def checkerboard(size: int, square: int = 8) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size]
    return np.where(((x // square) + (y // square)) % 2 == 0, 35, 220).astype(np.uint8)


def noise(size: int, seed: int = 99) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 256, size=(size, size)).astype(np.uint8)


def write_sapw(path: Path, layers: list[dict]) -> None:
    with open(path, "wb") as fh:
        fh.write(b"SAPW")
        fh.write(struct.pack("<II", 1, len(layers)))
        for layer in layers:
            weights = layer["weights"]
            rows, cols = weights.shape
            fh.write(struct.pack("<II", rows, cols))
            fh.write(struct.pack("<ddd", layer["weight_scale"], layer["input_scale"],
                                 layer["output_scale"]))
            fh.write(weights.astype(np.int8).tobytes())
            fh.write(layer["bias"].astype("<i4").tobytes())


def reference_predictions(layers: list[dict], images: np.ndarray) -> list[int]:
    """Plain-integer inference defining the expected exact-mode behavior.

    Products are int64 multiplies; between layers the accumulator is ReLU'd and
    requantized with clamp(floor(acc * in_scale * w_scale / out_scale + 0.5), 0, 255).
    """
    predictions = []
    for image in images:
        x = image.reshape(-1).astype(np.int64)
        for index, layer in enumerate(layers):
            acc = layer["weights"].astype(np.int64) @ x + layer["bias"].astype(np.int64)
            if index == len(layers) - 1:
                x = acc
            else:
                scale = layer["input_scale"] * layer["weight_scale"] / layer["output_scale"]
                x = np.clip(np.floor(np.maximum(acc, 0) * scale + 0.5), 0, 255).astype(np.int64)
        predictions.append(int(np.argmax(x)))
    return predictions


def build_fixture_network(images: np.ndarray) -> list[dict]:
    raw = fixture_weights()
    input_scale = 1.0 / 255.0
    w1_scale = 0.01
    layer1 = {
        "weights": raw["w1"],
        "bias": raw["b1"],
        "weight_scale": w1_scale,
        "input_scale": input_scale,
        "output_scale": 1.0,  # placeholder until calibrated below
    }
    # calibrate the hidden scale so activations span the uint8 range
    peak = 0
    for image in images[:200]:
        acc = raw["w1"].astype(np.int64) @ image.reshape(-1).astype(np.int64) + raw["b1"]
        peak = max(peak, int(acc.max()))
    layer1["output_scale"] = peak * input_scale * w1_scale / 255.0
    layer2 = {
        "weights": raw["w2"],
        "bias": raw["b2"],
        "weight_scale": 0.02,
        "input_scale": layer1["output_scale"],
        "output_scale": 1.0,
    }
    return [layer1, layer2]


def main() -> None:
    write_pgm(HERE / "natural_a_256.pgm", natural_texture(256, 256, seed=7))
    write_pgm(HERE / "natural_b_256.pgm", natural_texture(256, 256, seed=21))
    rgb = np.stack(
        [
            natural_texture(192, 144, seed=11),
            natural_texture(192, 144, seed=12),
            natural_texture(192, 144, seed=13),
        ],
        axis=-1,
    )
    write_ppm(HERE / "natural_rgb_192x144.ppm", rgb)
    write_pgm(HERE / "gradient_64.pgm", gradient(64))
    write_pgm(HERE / "checkerboard_64.pgm", checkerboard(64))
    write_pgm(HERE / "noise_64.pgm", noise(64))

    images = digit_like_images(FIXTURE_IMAGE_COUNT)
    labels = digit_like_labels(FIXTURE_IMAGE_COUNT)
    layers = build_fixture_network(images)
    write_sapw(HERE / "mlp_fixture.sapw", layers)
    predictions = reference_predictions(layers, images)
    agreement = float(np.mean(np.asarray(predictions) == labels))
    with open(HERE / "mlp_fixture_predictions.json", "w") as fh:
        json.dump(
            {
                "images": "tests/synth.py digit_like_images(1000)",
                "samples": FIXTURE_IMAGE_COUNT,
                "label_agreement": agreement,
                "predictions": predictions,
            },
            fh,
            indent=2,
        )
        fh.write("\n")
    print(f"wrote fixtures to {HERE}")
    print(f"fixture network matches synthetic labels on {agreement:.1%} of images")


if __name__ == "__main__":
    main()
