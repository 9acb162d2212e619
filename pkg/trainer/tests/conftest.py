import struct
from pathlib import Path

import numpy as np
import pytest


def blob_dataset(count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Learnable 28x28 task: the label encodes which grid cell the blob sits in."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:28, 0:28].astype(np.int64)
    images = np.zeros((count, 784), dtype=np.uint8)
    labels = np.zeros(count, dtype=np.uint8)
    for i in range(count):
        cell = int(rng.integers(0, 10))
        cx = (cell % 5) * 5 + 3 + int(rng.integers(0, 3))
        cy = (cell // 5) * 12 + 5 + int(rng.integers(0, 4))
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        blob = np.maximum(0, 230 - d2 * 12)
        noise = rng.integers(0, 25, size=(28, 28))
        images[i] = np.clip(blob + noise, 0, 255).reshape(-1).astype(np.uint8)
        labels[i] = cell
    return images, labels


def write_idx(directory: Path, images: np.ndarray, labels: np.ndarray, stem: str) -> None:
    count = len(images)
    with open(directory / f"{stem}-images-idx3-ubyte", "wb") as fh:
        fh.write(struct.pack(">IIII", 0x00000803, count, 28, 28))
        fh.write(images.astype(np.uint8).tobytes())
    with open(directory / f"{stem}-labels-idx1-ubyte", "wb") as fh:
        fh.write(struct.pack(">II", 0x00000801, count))
        fh.write(labels.astype(np.uint8).tobytes())


@pytest.fixture(scope="session")
def synthetic_data_dir(tmp_path_factory) -> Path:
    directory = tmp_path_factory.mktemp("blobs")
    train_images, train_labels = blob_dataset(3000, seed=5)
    test_images, test_labels = blob_dataset(800, seed=6)
    write_idx(directory, train_images, train_labels, "train")
    write_idx(directory, test_images, test_labels, "t10k")
    return directory
