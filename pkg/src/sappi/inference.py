"""Quantized fully connected MNIST inference on the approximate multiplier.

The network is int8 weights / uint8 activations with int32 biases and
accumulators.  Every weight-activation product is a sign-magnitude
multiplication on the unsigned shift-and-add multiplier: the activation is the
multiplier operand, so zero activations execute no additions at all, and with
k = 0 every product equals the plain integer product.  Cross-product
accumulation, bias addition, ReLU, and requantization are exact integer
operations.

Requantization between layers is ``clamp(floor(acc * scale + 0.5), 0, 255)``
with ``scale = input_scale * weight_scale / output_scale``; any producer of
weight files must use the same rule for its reference predictions to be
reproducible here.
"""

import gzip
import json
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import costs
from .errors import FormatError, RangeError
from .rca import MulConfig, RcaConfig, shift_add_multiply_array

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

SAPW_MAGIC = b"SAPW"
SAPW_VERSION = 1


@dataclass(frozen=True)
class MnistSet:
    images: np.ndarray  # (count, rows, cols) uint8
    labels: np.ndarray  # (count,) uint8

    def __len__(self) -> int:
        return len(self.labels)


def _read_file(path) -> bytes:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:2] == b"\x1f\x8b":
        blob = gzip.decompress(blob)
    return blob


def load_idx(images_path, labels_path) -> MnistSet:
    """Read a big-endian IDX image/label file pair with magic and count checks."""
    blob = _read_file(images_path)
    if len(blob) < 16:
        raise FormatError("image file too short for an IDX header")
    magic, count, rows, cols = struct.unpack(">IIII", blob[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise FormatError(f"bad image magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}")
    expected = count * rows * cols
    payload = blob[16 : 16 + expected]
    if len(payload) != expected:
        raise FormatError("image payload truncated")
    images = np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)

    blob = _read_file(labels_path)
    if len(blob) < 8:
        raise FormatError("label file too short for an IDX header")
    magic, label_count = struct.unpack(">II", blob[:8])
    if magic != IDX_LABELS_MAGIC:
        raise FormatError(f"bad label magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}")
    if label_count != count:
        raise FormatError(f"count mismatch: {count} images vs {label_count} labels")
    payload = blob[8 : 8 + label_count]
    if len(payload) != label_count:
        raise FormatError("label payload truncated")
    return MnistSet(images=images, labels=np.frombuffer(payload, dtype=np.uint8))


@dataclass(frozen=True)
class QuantizedDense:
    weights: np.ndarray  # (out, in) int8
    bias: np.ndarray     # (out,) int32
    weight_scale: float
    input_scale: float
    output_scale: float

    def __post_init__(self):
        if self.weights.dtype != np.int8 or self.weights.ndim != 2:
            raise FormatError("weights must be an int8 matrix")
        if (self.weights == -128).any():
            raise FormatError("weight magnitudes are limited to 127")
        if self.bias.dtype != np.int32 or self.bias.shape != (self.weights.shape[0],):
            raise FormatError("bias must be int32 with one entry per output row")
        for name in ("weight_scale", "input_scale", "output_scale"):
            if not getattr(self, name) > 0:
                raise FormatError(f"{name} must be positive")

    @property
    def out_features(self) -> int:
        return self.weights.shape[0]

    @property
    def in_features(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class QuantizedNetwork:
    layers: tuple[QuantizedDense, ...]

    def __post_init__(self):
        if not self.layers:
            raise FormatError("network needs at least one layer")
        for first, second in zip(self.layers, self.layers[1:]):
            if first.out_features != second.in_features:
                raise FormatError(
                    f"layer dimensions do not chain: {first.out_features} -> {second.in_features}"
                )

    @property
    def in_features(self) -> int:
        return self.layers[0].in_features


def load_weights(path) -> QuantizedNetwork:
    """Parse the little-endian SAPW weights container."""
    blob = _read_file(path)
    if blob[:4] != SAPW_MAGIC:
        raise FormatError(f"bad weights magic {blob[:4]!r}")
    offset = 4

    def take(fmt):
        nonlocal offset
        size = struct.calcsize(fmt)
        if offset + size > len(blob):
            raise FormatError("weights file truncated")
        values = struct.unpack_from(fmt, blob, offset)
        offset += size
        return values

    (version,) = take("<I")
    if version != SAPW_VERSION:
        raise FormatError(f"unsupported weights version {version}")
    (layer_count,) = take("<I")
    layers = []
    for _ in range(layer_count):
        rows, cols = take("<II")
        weight_scale, input_scale, output_scale = take("<ddd")
        count = rows * cols
        if offset + count + 4 * rows > len(blob):
            raise FormatError("weights file truncated")
        weights = np.frombuffer(blob, dtype=np.int8, count=count, offset=offset).reshape(rows, cols)
        offset += count
        bias = np.frombuffer(blob, dtype="<i4", count=rows, offset=offset).astype(np.int32)
        offset += 4 * rows
        layers.append(
            QuantizedDense(
                weights=weights,
                bias=bias,
                weight_scale=weight_scale,
                input_scale=input_scale,
                output_scale=output_scale,
            )
        )
    if offset != len(blob):
        raise FormatError(f"{len(blob) - offset} trailing bytes after the last layer")
    return QuantizedNetwork(layers=tuple(layers))


@lru_cache(maxsize=8)
def _product_table(n: int, k: int, kind) -> np.ndarray:
    """All 256x256 multiplier outcomes for one adder configuration.

    The multiplier is a pure function of its byte operands once the adder is
    fixed, so inference gathers from this table instead of re-simulating the
    same additions millions of times.  Built by the vectorized multiplier
    itself, whose agreement with the scalar routine and the step machine is
    covered by the adder tests.
    """
    cfg = MulConfig(RcaConfig(n, k, kind), a_bits=8, b_bits=8)
    a, b = np.meshgrid(np.arange(256), np.arange(256), indexing="ij")
    table, _ = shift_add_multiply_array(cfg, a.ravel(), b.ravel())
    return table.reshape(256, 256)


def _products(layer: QuantizedDense, x: np.ndarray, cfg: MulConfig) -> tuple[np.ndarray, int]:
    """Signed products weights * activations for a batch, plus additions executed.

    x: (batch, in) uint8. Returns (batch, out, in) int64.  The exact-mode
    shortcut is semantically identical: with k = 0 the shift-and-add multiplier
    reproduces the integer product, so only the cost accounting remains.
    """
    w = layer.weights.astype(np.int64)
    magnitude = np.abs(w)
    x64 = x.astype(np.int64)
    # one addition per set bit of each activation, once per output row
    additions = int(np.bitwise_count(x64).sum()) * layer.out_features
    if cfg.rca.k == 0:
        products = magnitude[None, :, :] * x64[:, None, :]
    else:
        table = _product_table(cfg.rca.n, cfg.rca.k, cfg.rca.kind)
        products = table[magnitude[None, :, :], x64[:, None, :]]
    return np.where(w[None, :, :] < 0, -products, products), additions


def _requantize(acc: np.ndarray, layer: QuantizedDense) -> np.ndarray:
    scale = layer.input_scale * layer.weight_scale / layer.output_scale
    return np.clip(np.floor(acc * scale + 0.5), 0, 255).astype(np.int64)


def _forward(net: QuantizedNetwork, batch: np.ndarray, cfg: MulConfig) -> tuple[np.ndarray, int]:
    """Run a uint8 batch (count, features); returns argmax classes and additions."""
    x = batch.astype(np.int64)
    additions = 0
    last = len(net.layers) - 1
    for index, layer in enumerate(net.layers):
        products, adds = _products(layer, x, cfg)
        additions += adds
        acc = products.sum(axis=2, dtype=np.int64) + layer.bias.astype(np.int64)
        if np.abs(acc).max(initial=0) >= 2**31:
            raise RangeError("accumulator exceeded int32 range")
        if index == last:
            x = acc
        else:
            x = _requantize(np.maximum(acc, 0), layer)
    return np.argmax(x, axis=1), additions


@dataclass(frozen=True)
class InferCost:
    additions: int
    steps: int
    energy_nj: float


def _cost(cfg: MulConfig, additions: int) -> InferCost:
    rca = cfg.rca
    return InferCost(
        additions=additions,
        steps=additions * costs.steps(rca.kind, rca.n, rca.k),
        energy_nj=additions * costs.energy(rca.kind, rca.n, rca.k),
    )


def infer(net: QuantizedNetwork, image: np.ndarray, cfg: MulConfig) -> tuple[int, InferCost]:
    """Classify one image; ties in the final argmax break to the lowest class index."""
    flat = np.asarray(image, dtype=np.uint8).reshape(1, -1)
    if flat.shape[1] != net.in_features:
        raise RangeError(f"image has {flat.shape[1]} values, network expects {net.in_features}")
    classes, additions = _forward(net, flat, cfg)
    return int(classes[0]), _cost(cfg, additions)


@dataclass(frozen=True)
class EvalReport:
    kind: str
    k: int
    samples: int
    accuracy: float | None  # None when no samples were evaluated
    energy_j: float
    steps: int
    additions: int
    predictions: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "samples": self.samples,
            "accuracy": self.accuracy,
            "energy_j": self.energy_j,
            "steps": self.steps,
            "additions": self.additions,
        }


def evaluate(
    net: QuantizedNetwork,
    dataset: MnistSet,
    cfg: MulConfig,
    sample_limit: int | None = None,
    batch_size: int = 64,
) -> EvalReport:
    """Accuracy and cost over the first ``sample_limit`` images in dataset order."""
    count = len(dataset) if sample_limit is None else min(sample_limit, len(dataset))
    predictions = []
    additions = 0
    for start in range(0, count, batch_size):
        stop = min(start + batch_size, count)
        batch = dataset.images[start:stop].reshape(stop - start, -1)
        classes, adds = _forward(net, batch, cfg)
        predictions.extend(int(c) for c in classes)
        additions += adds
    correct = sum(
        1 for predicted, label in zip(predictions, dataset.labels[:count]) if predicted == label
    )
    cost = _cost(cfg, additions)
    return EvalReport(
        kind=str(cfg.rca.kind),
        k=cfg.rca.k,
        samples=count,
        accuracy=(correct / count) if count else None,
        energy_j=cost.energy_nj * 1e-9,
        steps=cost.steps,
        additions=cost.additions,
        predictions=tuple(predictions),
    )


def report_json(report: EvalReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
