"""Minimal big-endian IDX reader for the MNIST files (plain or gzipped)."""

import gzip
import struct
from pathlib import Path

import numpy as np

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class DatasetError(ValueError):
    pass


def _read(path: Path) -> bytes:
    blob = Path(path).read_bytes()
    if blob[:2] == b"\x1f\x8b":
        blob = gzip.decompress(blob)
    return blob


def read_images(path) -> np.ndarray:
    blob = _read(path)
    if len(blob) < 16:
        raise DatasetError(f"{path}: too short for an IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", blob[:16])
    if magic != IMAGES_MAGIC:
        raise DatasetError(f"{path}: bad magic 0x{magic:08x}")
    expected = count * rows * cols
    if len(blob) - 16 != expected:
        raise DatasetError(f"{path}: expected {expected} pixel bytes, found {len(blob) - 16}")
    return np.frombuffer(blob, dtype=np.uint8, offset=16).reshape(count, rows * cols)


def read_labels(path) -> np.ndarray:
    blob = _read(path)
    if len(blob) < 8:
        raise DatasetError(f"{path}: too short for an IDX label header")
    magic, count = struct.unpack(">II", blob[:8])
    if magic != LABELS_MAGIC:
        raise DatasetError(f"{path}: bad magic 0x{magic:08x}")
    if len(blob) - 8 != count:
        raise DatasetError(f"{path}: expected {count} labels, found {len(blob) - 8}")
    return np.frombuffer(blob, dtype=np.uint8, offset=8)


_CANDIDATES = {
    "train_images": ("train-images-idx3-ubyte", "train-images.idx3-ubyte"),
    "train_labels": ("train-labels-idx1-ubyte", "train-labels.idx1-ubyte"),
    "test_images": ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
    "test_labels": ("t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"),
}


def locate(data_dir, role: str) -> Path:
    directory = Path(data_dir)
    for stem in _CANDIDATES[role]:
        for name in (stem, stem + ".gz"):
            candidate = directory / name
            if candidate.exists():
                return candidate
    raise DatasetError(f"no {role} file under {directory}")


def load_split(data_dir, split: str) -> tuple[np.ndarray, np.ndarray]:
    images = read_images(locate(data_dir, f"{split}_images"))
    labels = read_labels(locate(data_dir, f"{split}_labels"))
    if len(images) != len(labels):
        raise DatasetError(f"{split}: {len(images)} images vs {len(labels)} labels")
    return images, labels
