"""Post-training quantization to the SAPW scheme, plus its integer reference.

Scheme: symmetric per-tensor int8 weights (magnitudes capped at 127), uint8
activations, int32 biases and accumulators.  A layer's raw accumulator relates
to float values through input_scale * weight_scale; activations hand over to
the next layer as uint8 at that layer's output_scale with

    q = clamp(floor(acc * input_scale * weight_scale / output_scale + 0.5), 0, 255)

which is the exact rule the evaluation side applies, so the reference
predictions computed here are reproducible bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .mlp import Model


@dataclass(frozen=True)
class QuantizedLayer:
    weights: np.ndarray  # int8 (out, in)
    bias: np.ndarray     # int32 (out,)
    weight_scale: float
    input_scale: float
    output_scale: float


def _quantize_tensor(values: np.ndarray) -> tuple[np.ndarray, float]:
    scale = float(np.abs(values).max()) / 127.0
    if scale == 0.0:
        scale = 1.0
    q = np.clip(np.rint(values / scale), -127, 127).astype(np.int8)
    return q, scale


def quantize_model(model: Model, calibration_images: np.ndarray) -> list[QuantizedLayer]:
    """Quantize both layers, calibrating the hidden scale on sample images."""
    input_scale = 1.0 / 255.0
    w1_q, w1_scale = _quantize_tensor(model.w1)
    b1_q = np.rint(model.b1 / (input_scale * w1_scale)).astype(np.int32)

    x = calibration_images.astype(np.float64) / 255.0
    hidden_peak = float(model.hidden_activations(x).max())
    if hidden_peak == 0.0:
        hidden_peak = 1.0
    hidden_scale = hidden_peak / 255.0

    w2_q, w2_scale = _quantize_tensor(model.w2)
    b2_q = np.rint(model.b2 / (hidden_scale * w2_scale)).astype(np.int32)

    return [
        QuantizedLayer(w1_q, b1_q, w1_scale, input_scale, hidden_scale),
        QuantizedLayer(w2_q, b2_q, w2_scale, hidden_scale, 1.0),
    ]


def reference_predict(layers: list[QuantizedLayer], images: np.ndarray) -> np.ndarray:
    """Integer inference defining exact-mode behavior; argmax ties break low."""
    x = images.astype(np.int64)
    for index, layer in enumerate(layers):
        acc = x @ layer.weights.astype(np.int64).T + layer.bias.astype(np.int64)
        if index == len(layers) - 1:
            x = acc
        else:
            scale = layer.input_scale * layer.weight_scale / layer.output_scale
            x = np.clip(np.floor(np.maximum(acc, 0) * scale + 0.5), 0, 255).astype(np.int64)
    return np.argmax(x, axis=1)
