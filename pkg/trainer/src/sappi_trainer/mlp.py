"""Plain numpy MLP with one hidden ReLU layer, trained by momentum SGD."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 4
    batch_size: int = 64
    learning_rate: float = 0.1
    momentum: float = 0.9
    hidden: int = 128
    seed: int = 1234  # fixed so exports are reproducible


@dataclass
class Model:
    w1: np.ndarray  # (hidden, in)
    b1: np.ndarray
    w2: np.ndarray  # (classes, hidden)
    b2: np.ndarray

    def hidden_activations(self, x: np.ndarray) -> np.ndarray:
        return np.maximum(x @ self.w1.T + self.b1, 0.0)

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.hidden_activations(x) @ self.w2.T + self.b2

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.logits(x), axis=1)


def _init(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)).astype(np.float64)


def train(images: np.ndarray, labels: np.ndarray, config: TrainingConfig,
          classes: int = 10, log=None) -> Model:
    """images: (count, features) uint8; labels: (count,) ints."""
    rng = np.random.default_rng(config.seed)
    x_all = images.astype(np.float64) / 255.0
    y_all = labels.astype(np.int64)
    count, features = x_all.shape

    model = Model(
        w1=_init(rng, config.hidden, features),
        b1=np.zeros(config.hidden),
        w2=_init(rng, classes, config.hidden),
        b2=np.zeros(classes),
    )
    velocity = [np.zeros_like(p) for p in (model.w1, model.b1, model.w2, model.b2)]

    for epoch in range(config.epochs):
        order = rng.permutation(count)
        losses = []
        for start in range(0, count, config.batch_size):
            batch = order[start : start + config.batch_size]
            x, y = x_all[batch], y_all[batch]

            h_pre = x @ model.w1.T + model.b1
            h = np.maximum(h_pre, 0.0)
            logits = h @ model.w2.T + model.b2
            shifted = logits - logits.max(axis=1, keepdims=True)
            probs = np.exp(shifted)
            probs /= probs.sum(axis=1, keepdims=True)
            losses.append(float(-np.log(probs[np.arange(len(y)), y] + 1e-12).mean()))

            grad_logits = probs
            grad_logits[np.arange(len(y)), y] -= 1.0
            grad_logits /= len(y)
            grad_w2 = grad_logits.T @ h
            grad_b2 = grad_logits.sum(axis=0)
            grad_h = grad_logits @ model.w2
            grad_h[h_pre <= 0.0] = 0.0
            grad_w1 = grad_h.T @ x
            grad_b1 = grad_h.sum(axis=0)

            params = (model.w1, model.b1, model.w2, model.b2)
            grads = (grad_w1, grad_b1, grad_w2, grad_b2)
            for param, grad, vel in zip(params, grads, velocity):
                vel *= config.momentum
                vel -= config.learning_rate * grad
                param += vel
        if log is not None:
            log(f"epoch {epoch + 1}/{config.epochs}: mean loss {np.mean(losses):.4f}")
    return model


def accuracy(model: Model, images: np.ndarray, labels: np.ndarray) -> float:
    x = images.astype(np.float64) / 255.0
    return float(np.mean(model.predict(x) == labels.astype(np.int64)))
