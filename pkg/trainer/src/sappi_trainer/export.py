"""Train, quantize, export: the whole pipeline behind the command line."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import idx, sapw
from .mlp import Model, TrainingConfig, accuracy, train
from .quantize import quantize_model, reference_predict

#: exports below this float test accuracy are certainly broken and refused
ACCURACY_FLOOR = 0.90

#: the reference report freezes predictions for this many leading test images
REFERENCE_SAMPLES = 1000


class ExportError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExportResult:
    model: Model
    float_accuracy: float
    quantized_accuracy: float
    float_agreement: float
    predictions: list[int]


def train_and_export(
    data_dir,
    weights_path,
    report_path,
    config: TrainingConfig = TrainingConfig(),
    log=print,
) -> ExportResult:
    """Train on the train split, export SAPW weights and the reference report.

    The report carries the float test accuracy, the quantized-reference
    accuracy, and the quantized predictions for the first 1000 test images,
    which downstream exact-mode evaluation must reproduce 1:1.
    """
    train_images, train_labels = idx.load_split(data_dir, "train")
    test_images, test_labels = idx.load_split(data_dir, "test")
    log(f"loaded {len(train_images)} training and {len(test_images)} test images")

    model = train(train_images, train_labels, config, log=log)
    float_accuracy = accuracy(model, test_images, test_labels)
    log(f"float test accuracy: {float_accuracy:.4f}")
    if float_accuracy < ACCURACY_FLOOR:
        raise ExportError(
            f"float accuracy {float_accuracy:.4f} is below the {ACCURACY_FLOOR:.2f} floor; "
            "refusing to export"
        )

    layers = quantize_model(model, train_images[:2000])
    quantized = reference_predict(layers, test_images)
    quantized_accuracy = float(np.mean(quantized == test_labels.astype(np.int64)))
    float_agreement = float(
        np.mean(quantized == model.predict(test_images.astype(np.float64) / 255.0))
    )
    log(f"quantized reference accuracy: {quantized_accuracy:.4f} "
        f"(agrees with float argmax on {float_agreement:.1%})")

    sapw.write(layers, weights_path)
    predictions = [int(v) for v in quantized[:REFERENCE_SAMPLES]]
    report = {
        "float_accuracy": float_accuracy,
        "quantized_reference_accuracy": quantized_accuracy,
        "predictions": predictions,
    }
    with open(report_path, "w") as fh:
        json.dump(report, fh)
        fh.write("\n")
    log(f"wrote {Path(weights_path).name} and {Path(report_path).name}")
    return ExportResult(
        model=model,
        float_accuracy=float_accuracy,
        quantized_accuracy=quantized_accuracy,
        float_agreement=float_agreement,
        predictions=predictions,
    )
