import struct
import sys
from pathlib import Path

import numpy as np
import pytest

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR))

FIXTURES = TESTS_DIR / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def digit_set():
    from synth import digit_like_images, digit_like_labels

    return digit_like_images(1000), digit_like_labels(1000)


def write_idx_pair(directory: Path, images: np.ndarray, labels: np.ndarray,
                   stem: str = "synthetic") -> tuple[Path, Path]:
    count, rows, cols = images.shape
    images_path = directory / f"{stem}-images-idx3-ubyte"
    labels_path = directory / f"{stem}-labels-idx1-ubyte"
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", 0x00000803, count, rows, cols))
        fh.write(images.astype(np.uint8).tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", 0x00000801, count))
        fh.write(labels.astype(np.uint8).tobytes())
    return images_path, labels_path


@pytest.fixture()
def idx_pair(tmp_path, digit_set):
    images, labels = digit_set
    return write_idx_pair(tmp_path, images, labels)
