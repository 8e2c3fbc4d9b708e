"""Cross-entropy losses on predicted probabilities.

Probabilities are clamped to [1e-7, 1 - 1e-7] before logs; gradients are
consistent with the clamp (zero where it binds), so loss and gradient stay
finite-difference-exact.
"""

from __future__ import annotations

import numpy as np

from ..errors import UsageError

CLAMP = 1e-7


def _clamped(p: np.ndarray) -> np.ndarray:
    return np.clip(p, CLAMP, 1.0 - CLAMP)


def binary_cross_entropy(p, a):
    """-(a*log p + (1-a)*log(1-p)), elementwise; scalar in, scalar out."""
    p = _clamped(np.asarray(p, dtype=np.float64))
    a = np.asarray(a)
    loss = -(a * np.log(p) + (1 - a) * np.log1p(-p))
    return float(loss) if loss.ndim == 0 else loss


def categorical_cross_entropy(probs: np.ndarray, labels) -> np.ndarray | float:
    """-log p[label] per sample. probs: (k,) or (batch, k); rows must sum to 1."""
    probs = np.asarray(probs)
    squeeze = probs.ndim == 1
    if squeeze:
        probs = probs[None, :]
    labels = np.atleast_1d(np.asarray(labels))
    k = probs.shape[1]
    if labels.min() < 0 or labels.max() >= k:
        raise UsageError(f"class index out of range for {k} classes: {labels.min()}..{labels.max()}")
    sums = probs.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-6):
        raise UsageError("probabilities must sum to 1 within 1e-6")
    picked = _clamped(probs[np.arange(len(labels)), labels].astype(np.float64))
    loss = -np.log(picked)
    return float(loss[0]) if squeeze else loss


def categorical_cross_entropy_grad(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of the batch-MEAN loss w.r.t. probs: -1/(B*p) at the label."""
    probs = np.asarray(probs)
    labels = np.asarray(labels)
    b = probs.shape[0]
    grad = np.zeros_like(probs, dtype=probs.dtype)
    rows = np.arange(b)
    picked = probs[rows, labels]
    active = (picked > CLAMP) & (picked < 1.0 - CLAMP)
    grad[rows, labels] = np.where(active, -1.0 / np.maximum(picked, CLAMP), 0.0) / b
    return grad
