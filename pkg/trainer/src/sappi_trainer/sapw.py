"""SAPW weights-file writer.

Layout (little-endian): magic "SAPW", u32 version = 1, u32 layer_count, then
per layer u32 rows, u32 cols, f64 weight_scale, f64 input_scale,
f64 output_scale, rows*cols int8 row-major weights, rows int32 biases.
"""

import struct

import numpy as np

from .quantize import QuantizedLayer

MAGIC = b"SAPW"
VERSION = 1


def dump(layers: list[QuantizedLayer]) -> bytes:
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<II", VERSION, len(layers))
    for layer in layers:
        rows, cols = layer.weights.shape
        blob += struct.pack("<II", rows, cols)
        blob += struct.pack("<ddd", layer.weight_scale, layer.input_scale, layer.output_scale)
        blob += layer.weights.astype(np.int8).tobytes()
        blob += layer.bias.astype("<i4").tobytes()
    return bytes(blob)


def write(layers: list[QuantizedLayer], path) -> None:
    with open(path, "wb") as fh:
        fh.write(dump(layers))
