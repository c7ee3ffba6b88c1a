"""Fully connected network trained by backpropagation.

ReLU hidden layers, sigmoid output, binary cross-entropy plus l2 penalty,
mini-batch SGD with momentum 0.9.  Inputs are z-scored with train
statistics; init and epoch shuffling are seeded, so a fit is bit
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFinite
from ..seeding import rng_from
from .glm import sigmoid


@dataclass
class MlpModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_sizes: list[int]
    input_mean: np.ndarray
    input_scale: np.ndarray
    epochs: int
    batch_size: int
    learning_rate: float
    l2: float
    seed: int

    @property
    def width(self) -> int:
        return self.weights[0].shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        Z = (X - self.input_mean) / self.input_scale
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            Z = np.maximum(Z @ W + b, 0.0)
        return sigmoid(Z @ self.weights[-1] + self.biases[-1]).ravel()


def forward_backward(
    weights: list[np.ndarray],
    biases: list[np.ndarray],
    Xb: np.ndarray,
    yb: np.ndarray,
    l2: float,
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean BCE + (l2/2)*sum||W||^2 on a batch, with analytic gradients."""
    n = Xb.shape[0]
    activations = [Xb]
    Z = Xb
    for W, b in zip(weights[:-1], biases[:-1]):
        Z = np.maximum(Z @ W + b, 0.0)
        activations.append(Z)
    logits = (Z @ weights[-1] + biases[-1]).ravel()
    p = sigmoid(logits)
    eps = 1e-12
    loss = float(-np.mean(yb * np.log(p + eps) + (1.0 - yb) * np.log(1.0 - p + eps)))
    loss += 0.5 * l2 * sum(float(np.sum(W * W)) for W in weights)

    grad_w = [np.empty(0)] * len(weights)
    grad_b = [np.empty(0)] * len(biases)
    delta = ((p - yb) / n)[:, None]
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta + l2 * weights[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (activations[layer] > 0.0)
    return loss, grad_w, grad_b


def fit_mlp(
    X,
    y: np.ndarray,
    hidden_sizes: list[int] | tuple[int, ...] = (32, 32),
    epochs: int = 50,
    batch_size: int = 64,
    learning_rate: float = 0.01,
    l2: float = 1e-4,
    seed: int = 0,
    momentum: float = 0.9,
) -> MlpModel:
    if epochs < 1 or batch_size < 1 or not hidden_sizes:
        raise ValueError("epochs >= 1, batch_size >= 1, hidden_sizes non-empty required")
    values = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, width = values.shape

    mean = values.mean(axis=0)
    std = values.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    Z = (values - mean) / scale

    sizes = [width, *hidden_sizes, 1]
    init_rng = rng_from(seed, 0)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(init_rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))

    vel_w = [np.zeros_like(W) for W in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    for epoch in range(epochs):
        perm = rng_from(seed, 1, epoch).permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = perm[start : start + batch_size]
            loss, grad_w, grad_b = forward_backward(weights, biases, Z[batch], y[batch], l2)
            epoch_loss += loss * len(batch)
            for layer in range(len(weights)):
                vel_w[layer] = momentum * vel_w[layer] - learning_rate * grad_w[layer]
                vel_b[layer] = momentum * vel_b[layer] - learning_rate * grad_b[layer]
                weights[layer] += vel_w[layer]
                biases[layer] += vel_b[layer]
        if not np.isfinite(epoch_loss):
            raise NonFinite(f"MLP loss diverged at epoch {epoch}")

    return MlpModel(
        weights,
        biases,
        list(hidden_sizes),
        mean,
        scale,
        epochs,
        batch_size,
        learning_rate,
        l2,
        seed,
    )
