"""Dense-array layers with hand-written forward and backward passes.

The layer set is fixed: dense, conv2d (no padding), maxpool2d, dropout,
tanh/relu activations, softmax, flatten. Layers are functional: ``forward``
returns ``(output, cache)`` and ``backward(grad, cache)`` returns
``(input_grad, param_grads)``, so a frozen model can serve concurrent
read-only forwards (cache is only produced in training mode).

Arrays are numpy, row-major. Convolution inputs are NCHW. Math is
dtype-preserving: float32 for training, float64 inputs give float64
gradients (used by the finite-difference checks).
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from ..errors import ConfigurationError, UsageError


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


class Layer:
    """Base layer. Subclasses define kind, forward, backward, output_shape."""

    kind = "?"

    def params(self) -> dict[str, np.ndarray]:
        return {}

    def set_params(self, values: dict[str, np.ndarray]) -> None:
        for name, value in values.items():
            current = self.params()[name]
            if current.shape != value.shape:
                raise ConfigurationError(
                    f"{self.kind}: parameter {name} expects shape {current.shape}, got {value.shape}")
            current[...] = value

    def cast_params(self, dtype) -> None:
        """Rebind parameters to a new dtype. Do this before creating an
        optimizer: bindings go stale otherwise."""
        for name, arr in self.params().items():
            setattr(self, name, arr.astype(dtype))

    def forward(self, x: np.ndarray, training: bool = False, rng=None):
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray, cache):
        raise NotImplementedError

    def output_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        """Per-sample output shape for a per-sample input shape."""
        raise NotImplementedError

    def spec(self) -> dict:
        """JSON-ready description sufficient to rebuild the layer."""
        raise NotImplementedError

    def _require_cache(self, cache):
        if cache is None:
            raise UsageError(f"{self.kind}: backward needs the cache from a training-mode forward")
        return cache


class Dense(Layer):
    kind = "dense"

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator | None = None):
        self.in_dim = in_dim
        self.out_dim = out_dim
        rng = rng if rng is not None else np.random.default_rng(0)
        self.weight = glorot_uniform(rng, (in_dim, out_dim), in_dim, out_dim)
        self.bias = np.zeros(out_dim, dtype=np.float32)

    def params(self):
        return {"weight": self.weight, "bias": self.bias}

    def set_params(self, values):
        # keep attribute identity in sync with optimizer bindings
        super().set_params({k: np.asarray(v) for k, v in values.items()})

    def forward(self, x, training=False, rng=None):
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ConfigurationError(f"dense: expected input (batch, {self.in_dim}), got {x.shape}")
        y = x @ self.weight + self.bias
        return y, (x if training else None)

    def backward(self, grad_out, cache):
        x = self._require_cache(cache)
        grad_w = x.T @ grad_out
        grad_b = grad_out.sum(axis=0)
        grad_x = grad_out @ self.weight.T
        return grad_x, {"weight": grad_w, "bias": grad_b}

    def output_shape(self, in_shape):
        if in_shape != (self.in_dim,):
            raise ConfigurationError(f"dense: expected input shape ({self.in_dim},), got {in_shape}")
        return (self.out_dim,)

    def spec(self):
        return {"kind": self.kind, "in_dim": self.in_dim, "out_dim": self.out_dim}


class Conv2d(Layer):
    """2D convolution, no padding, square or rectangular kernel, stride >= 1."""

    kind = "conv2d"

    def __init__(self, in_channels: int, out_channels: int, kernel: tuple[int, int] | int,
                 stride: int = 1, rng: np.random.Generator | None = None):
        if isinstance(kernel, int):
            kernel = (kernel, kernel)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kh, self.kw = kernel
        self.stride = stride
        rng = rng if rng is not None else np.random.default_rng(0)
        fan_in = in_channels * self.kh * self.kw
        fan_out = out_channels * self.kh * self.kw
        self.weight = glorot_uniform(rng, (out_channels, in_channels, self.kh, self.kw), fan_in, fan_out)
        self.bias = np.zeros(out_channels, dtype=np.float32)

    def params(self):
        return {"weight": self.weight, "bias": self.bias}

    def _check_input(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ConfigurationError(
                f"conv2d: expected input (batch, {self.in_channels}, h, w), got {x.shape}")
        if x.shape[2] < self.kh or x.shape[3] < self.kw:
            raise ConfigurationError(f"conv2d: input {x.shape} smaller than kernel ({self.kh},{self.kw})")

    def _cols(self, x):
        # (B, C, H, W) -> (B, OH, OW, C*kh*kw) patch matrix
        s = self.stride
        windows = np.lib.stride_tricks.sliding_window_view(x, (self.kh, self.kw), axis=(2, 3))
        windows = windows[:, :, ::s, ::s, :, :]               # (B, C, OH, OW, kh, kw)
        cols = windows.transpose(0, 2, 3, 1, 4, 5)            # (B, OH, OW, C, kh, kw)
        b, oh, ow = cols.shape[:3]
        return np.ascontiguousarray(cols).reshape(b, oh, ow, -1), oh, ow

    def forward(self, x, training=False, rng=None):
        self._check_input(x)
        cols, oh, ow = self._cols(x)
        wmat = self.weight.reshape(self.out_channels, -1).T   # (C*kh*kw, out)
        y = cols.reshape(-1, cols.shape[-1]) @ wmat + self.bias
        y = y.reshape(x.shape[0], oh, ow, self.out_channels).transpose(0, 3, 1, 2)
        cache = (cols, x.shape) if training else None
        return np.ascontiguousarray(y), cache

    def backward(self, grad_out, cache):
        cols, x_shape = self._require_cache(cache)
        b, oh, ow, k = cols.shape
        g = grad_out.transpose(0, 2, 3, 1).reshape(-1, self.out_channels)  # (B*OH*OW, out)
        grad_wmat = cols.reshape(-1, k).T @ g                               # (k, out)
        grad_w = grad_wmat.T.reshape(self.weight.shape)
        grad_b = g.sum(axis=0)
        dcols = (g @ self.weight.reshape(self.out_channels, -1)).reshape(b, oh, ow,
                                                                         self.in_channels, self.kh, self.kw)
        grad_x = np.zeros(x_shape, dtype=grad_out.dtype)
        s = self.stride
        for i in range(self.kh):
            for j in range(self.kw):
                grad_x[:, :, i:i + s * oh:s, j:j + s * ow:s] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        return grad_x, {"weight": grad_w, "bias": grad_b}

    def output_shape(self, in_shape):
        c, h, w = in_shape
        if c != self.in_channels:
            raise ConfigurationError(f"conv2d: expected {self.in_channels} channels, got {c}")
        oh = (h - self.kh) // self.stride + 1
        ow = (w - self.kw) // self.stride + 1
        if oh < 1 or ow < 1:
            raise ConfigurationError(f"conv2d: input {in_shape} smaller than kernel ({self.kh},{self.kw})")
        return (self.out_channels, oh, ow)

    def spec(self):
        return {"kind": self.kind, "in_channels": self.in_channels, "out_channels": self.out_channels,
                "kernel": [self.kh, self.kw], "stride": self.stride}


class MaxPool2d(Layer):
    """Max pooling with stride equal to the pool size; dims must divide."""

    kind = "maxpool2d"

    def __init__(self, pool: tuple[int, int] | int = (2, 2)):
        if isinstance(pool, int):
            pool = (pool, pool)
        self.ph, self.pw = pool

    def forward(self, x, training=False, rng=None):
        if x.ndim != 4:
            raise ConfigurationError(f"maxpool2d: expected 4-d input, got {x.shape}")
        b, c, h, w = x.shape
        if h % self.ph or w % self.pw:
            raise ConfigurationError(
                f"maxpool2d: input {h}x{w} not divisible by pool ({self.ph},{self.pw})")
        oh, ow = h // self.ph, w // self.pw
        tiles = x.reshape(b, c, oh, self.ph, ow, self.pw).transpose(0, 1, 2, 4, 3, 5)
        tiles = tiles.reshape(b, c, oh, ow, self.ph * self.pw)
        arg = tiles.argmax(axis=-1)                 # first max wins ties
        y = np.take_along_axis(tiles, arg[..., None], axis=-1)[..., 0]
        cache = (arg, x.shape) if training else None
        return y, cache

    def backward(self, grad_out, cache):
        arg, x_shape = self._require_cache(cache)
        b, c, h, w = x_shape
        oh, ow = h // self.ph, w // self.pw
        flat = np.zeros((b, c, oh, ow, self.ph * self.pw), dtype=grad_out.dtype)
        np.put_along_axis(flat, arg[..., None], grad_out[..., None], axis=-1)
        grad_x = flat.reshape(b, c, oh, ow, self.ph, self.pw).transpose(0, 1, 2, 4, 3, 5)
        return grad_x.reshape(x_shape), {}

    def output_shape(self, in_shape):
        c, h, w = in_shape
        if h % self.ph or w % self.pw:
            raise ConfigurationError(
                f"maxpool2d: input {h}x{w} not divisible by pool ({self.ph},{self.pw})")
        return (c, h // self.ph, w // self.pw)

    def spec(self):
        return {"kind": self.kind, "pool": [self.ph, self.pw]}


class Dropout(Layer):
    """Inverted dropout: scales by 1/(1-p) in training, identity at inference."""

    kind = "dropout"

    def __init__(self, p: float):
        if not 0.0 <= p < 1.0:
            raise ConfigurationError(f"dropout: rate must be in [0, 1), got {p}")
        self.p = p

    def forward(self, x, training=False, rng=None):
        if not training or self.p == 0.0:
            return x, ("eval",) if training else None
        if rng is None:
            raise UsageError("dropout: training-mode forward needs an rng for the mask")
        mask = (rng.random(x.shape) >= self.p).astype(x.dtype) / (1.0 - self.p)
        return x * mask, ("train", mask)

    def backward(self, grad_out, cache):
        cache = self._require_cache(cache)
        if cache[0] == "eval":
            return grad_out, {}
        return grad_out * cache[1], {}

    def output_shape(self, in_shape):
        return in_shape

    def spec(self):
        return {"kind": self.kind, "p": self.p}


class Tanh(Layer):
    kind = "tanh"

    def forward(self, x, training=False, rng=None):
        y = np.tanh(x)
        return y, (y if training else None)

    def backward(self, grad_out, cache):
        y = self._require_cache(cache)
        return grad_out * (1.0 - y * y), {}

    def output_shape(self, in_shape):
        return in_shape

    def spec(self):
        return {"kind": self.kind}


class Relu(Layer):
    kind = "relu"

    def forward(self, x, training=False, rng=None):
        mask = x > 0
        return x * mask, (mask if training else None)

    def backward(self, grad_out, cache):
        mask = self._require_cache(cache)
        return grad_out * mask, {}

    def output_shape(self, in_shape):
        return in_shape

    def spec(self):
        return {"kind": self.kind}


class Softmax(Layer):
    """Softmax over the last axis. Outputs are strictly positive, sum to 1."""

    kind = "softmax"

    def forward(self, x, training=False, rng=None):
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        y = e / e.sum(axis=-1, keepdims=True)
        return y, (y if training else None)

    def backward(self, grad_out, cache):
        y = self._require_cache(cache)
        inner = (grad_out * y).sum(axis=-1, keepdims=True)
        return y * (grad_out - inner), {}

    def output_shape(self, in_shape):
        return in_shape

    def spec(self):
        return {"kind": self.kind}


class Flatten(Layer):
    kind = "flatten"

    def forward(self, x, training=False, rng=None):
        y = x.reshape(x.shape[0], -1)
        return y, (x.shape if training else None)

    def backward(self, grad_out, cache):
        shape = self._require_cache(cache)
        return grad_out.reshape(shape), {}

    def output_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def spec(self):
        return {"kind": self.kind}


_LAYER_KINDS = {cls.kind: cls for cls in (Dense, Conv2d, MaxPool2d, Dropout, Tanh, Relu, Softmax, Flatten)}


def layer_from_spec(spec: dict) -> Layer:
    kind = spec.get("kind")
    if kind == "dense":
        return Dense(spec["in_dim"], spec["out_dim"])
    if kind == "conv2d":
        return Conv2d(spec["in_channels"], spec["out_channels"], tuple(spec["kernel"]), spec["stride"])
    if kind == "maxpool2d":
        return MaxPool2d(tuple(spec["pool"]))
    if kind == "dropout":
        return Dropout(spec["p"])
    if kind in ("tanh", "relu", "softmax", "flatten"):
        return _LAYER_KINDS[kind]()
    raise ConfigurationError(f"unknown layer kind {kind!r}")


class LayerStack:
    """A sequential composition of layers sharing one forward/backward pass.

    An empty stack is the identity (used when inputs are precomputed
    features).
    """

    def __init__(self, layers: Sequence[Layer] = ()):
        self.layers = list(layers)

    def __len__(self):
        return len(self.layers)

    def __iter__(self) -> Iterator[Layer]:
        return iter(self.layers)

    def forward(self, x: np.ndarray, training: bool = False, rng=None):
        caches = [] if training else None
        y = x
        for layer in self.layers:
            y, cache = layer.forward(y, training=training, rng=rng)
            if training:
                caches.append(cache)
        return y, caches

    def backward(self, grad_out: np.ndarray, caches):
        if caches is None:
            raise UsageError("stack backward needs caches from a training-mode forward")
        if len(caches) != len(self.layers):
            raise UsageError("cache does not match this stack")
        grads: list[dict[str, np.ndarray]] = [{} for _ in self.layers]
        g = grad_out
        for idx in range(len(self.layers) - 1, -1, -1):
            g, grads[idx] = self.layers[idx].backward(g, caches[idx])
        return g, grads

    def output_shape(self, in_shape: tuple[int, ...]) -> tuple[int, ...]:
        shape = in_shape
        for layer in self.layers:
            shape = layer.output_shape(shape)
        return shape

    def cast_params(self, dtype) -> None:
        for layer in self.layers:
            layer.cast_params(dtype)

    def param_list(self) -> list[np.ndarray]:
        """Parameters in a fixed order (layer order, name-sorted within)."""
        out = []
        for layer in self.layers:
            for name in sorted(layer.params()):
                out.append(layer.params()[name])
        return out

    def grad_list(self, grads: Sequence[dict[str, np.ndarray]]) -> list[np.ndarray]:
        out = []
        for layer, gd in zip(self.layers, grads):
            for name in sorted(layer.params()):
                out.append(gd[name])
        return out

    def specs(self) -> list[dict]:
        return [layer.spec() for layer in self.layers]

    @classmethod
    def from_specs(cls, specs: Sequence[dict]) -> "LayerStack":
        return cls([layer_from_spec(s) for s in specs])
