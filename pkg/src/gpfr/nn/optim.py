"""Adam and RMSprop, updating parameter arrays in place.

An optimizer binds a fixed parameter list at construction; ``step`` takes
gradients in the same order. Moment accumulators mirror parameter shapes.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, UsageError


class Optimizer:
    kind = "?"

    def __init__(self, params: list[np.ndarray], lr: float):
        self.params = list(params)
        self.lr = lr
        self.t = 0

    def _check(self, grads):
        if len(grads) != len(self.params):
            raise UsageError(f"{self.kind}: expected {len(self.params)} gradients, got {len(grads)}")
        for p, g in zip(self.params, grads):
            if p.shape != g.shape:
                raise ConfigurationError(f"{self.kind}: gradient shape {g.shape} != parameter shape {p.shape}")

    def step(self, grads: list[np.ndarray]) -> None:
        raise NotImplementedError


class Adam(Optimizer):
    kind = "adam"

    def __init__(self, params, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(params, lr)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]

    def step(self, grads):
        self._check(grads)
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


class RMSprop(Optimizer):
    kind = "rmsprop"

    def __init__(self, params, lr: float = 1e-3, rho: float = 0.9, eps: float = 1e-8):
        super().__init__(params, lr)
        self.rho, self.eps = rho, eps
        self.v = [np.zeros_like(p) for p in self.params]

    def step(self, grads):
        self._check(grads)
        self.t += 1
        for p, g, v in zip(self.params, grads, self.v):
            v *= self.rho
            v += (1.0 - self.rho) * np.square(g)
            p -= self.lr * g / (np.sqrt(v) + self.eps)


def make_optimizer(kind: str, params, lr: float) -> Optimizer:
    if kind == "adam":
        return Adam(params, lr=lr)
    if kind == "rmsprop":
        return RMSprop(params, lr=lr)
    raise UsageError(f"unknown optimizer {kind!r} (expected adam or rmsprop)")
