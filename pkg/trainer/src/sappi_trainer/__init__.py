"""Trainer and quantized-weights exporter for the approximate-inference toolkit."""

__version__ = "0.1.0"

from .export import ExportError, train_and_export
from .mlp import Model, TrainingConfig, accuracy, train
from .quantize import QuantizedLayer, quantize_model, reference_predict

__all__ = [
    "ExportError",
    "Model",
    "QuantizedLayer",
    "TrainingConfig",
    "accuracy",
    "quantize_model",
    "reference_predict",
    "train",
    "train_and_export",
]
