"""Minimal CHW tensor ops for forward inference.

A tensor is a float64 ``numpy.ndarray`` of shape ``(channels, height,
width)``. Every op is a pure function of its inputs and raises
``ValueError`` on shape or parameter mismatches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

UPSAMPLE_KINDS = ("bilinear", "nearest")


def as_tensor(x, name: str = "input") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"{name}: expected a (C, H, W) tensor, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True)
class ConvParams:
    """Weights of a stride-1 'same' convolution.

    ``weights`` has shape (out, in, k, k) with k in {1, 3}; padding is
    derived as ``dilation * (k - 1) // 2`` so spatial size is preserved.
    """

    weights: np.ndarray
    bias: np.ndarray
    dilation: int = 1

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        b = np.ascontiguousarray(self.bias, dtype=np.float64)
        if w.ndim != 4 or w.shape[2] != w.shape[3] or w.shape[2] not in (1, 3):
            raise ValueError(f"conv weights must be (out, in, k, k) with k in (1, 3), got {w.shape}")
        if b.shape != (w.shape[0],):
            raise ValueError(f"conv bias must have shape ({w.shape[0]},), got {b.shape}")
        if int(self.dilation) < 1:
            raise ValueError(f"dilation must be a positive integer, got {self.dilation}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "dilation", int(self.dilation))

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def kernel(self) -> int:
        return self.weights.shape[2]

    @property
    def padding(self) -> int:
        return self.dilation * (self.kernel - 1) // 2


@dataclass(frozen=True)
class BatchNormParams:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    epsilon: float = 1e-5

    def __post_init__(self):
        fields = ("gamma", "beta", "running_mean", "running_var")
        arrs = [np.ascontiguousarray(getattr(self, f), dtype=np.float64) for f in fields]
        n = arrs[0].shape
        if len(n) != 1 or any(a.shape != n for a in arrs):
            raise ValueError("batchnorm parameters must be 1-D arrays of equal length")
        if np.any(arrs[3] < 0):
            raise ValueError("running_var must be non-negative")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        for f, a in zip(fields, arrs):
            object.__setattr__(self, f, a)

    @property
    def channels(self) -> int:
        return self.gamma.shape[0]


def conv2d(x, p: ConvParams) -> np.ndarray:
    x = as_tensor(x)
    if x.shape[0] != p.in_channels:
        raise ValueError(f"conv2d: input has {x.shape[0]} channels, kernel expects {p.in_channels}")
    return kernels.conv2d(x, p.weights, p.bias, p.dilation)


def batchnorm_infer(x, p: BatchNormParams) -> np.ndarray:
    x = as_tensor(x)
    if x.shape[0] != p.channels:
        raise ValueError(f"batchnorm: input has {x.shape[0]} channels, params have {p.channels}")
    scale = p.gamma / np.sqrt(p.running_var + p.epsilon)
    return (x - p.running_mean[:, None, None]) * scale[:, None, None] + p.beta[:, None, None]


def relu(x) -> np.ndarray:
    return np.maximum(as_tensor(x), 0.0)


def sigmoid(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    # split by sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def activation(x, kind: str) -> np.ndarray:
    if kind == "relu":
        return relu(x)
    if kind == "sigmoid":
        return sigmoid(as_tensor(x))
    raise ValueError(f"unknown activation {kind!r}")


def global_avg_pool(x) -> np.ndarray:
    x = as_tensor(x)
    if x.shape[1] < 1 or x.shape[2] < 1:
        raise ValueError("global_avg_pool: empty spatial extent")
    return x.mean(axis=(1, 2), keepdims=True)


def _bilinear_axis(n_in: int, n_out: int):
    # half-pixel centres, clamped at the borders
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    i0 = np.floor(src).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = src - i0
    return i0, i1, frac


def upsample2x(x, kind: str = "bilinear") -> np.ndarray:
    """Double height and width. Bilinear uses half-pixel centres
    (``align_corners=False`` convention); nearest repeats pixels."""
    x = as_tensor(x)
    if kind == "nearest":
        return x.repeat(2, axis=1).repeat(2, axis=2)
    if kind != "bilinear":
        raise ValueError(f"unknown upsample kind {kind!r}")
    _, h, w = x.shape
    y0, y1, fy = _bilinear_axis(h, 2 * h)
    x0, x1, fx = _bilinear_axis(w, 2 * w)
    rows = x[:, y0, :] * (1.0 - fy)[None, :, None] + x[:, y1, :] * fy[None, :, None]
    return rows[:, :, x0] * (1.0 - fx) + rows[:, :, x1] * fx


def upsample_to(x, height: int, width: int, kind: str = "bilinear") -> np.ndarray:
    """Repeated ``upsample2x`` until the spatial size is (height, width)."""
    x = as_tensor(x)
    while x.shape[1] < height or x.shape[2] < width:
        x = upsample2x(x, kind)
    if x.shape[1:] != (height, width):
        raise ValueError(f"cannot upsample to {(height, width)} by doubling; reached {x.shape[1:]}")
    return x


def concat_channels(a, b) -> np.ndarray:
    a = as_tensor(a, "a")
    b = as_tensor(b, "b")
    if a.shape[1:] != b.shape[1:]:
        raise ValueError(f"concat_channels: spatial mismatch {a.shape[1:]} vs {b.shape[1:]}")
    return np.concatenate([a, b], axis=0)


def elementwise(a, b, kind: str) -> np.ndarray:
    """``add`` or ``mul``; ``b`` may also be (C, 1, 1) and is then
    broadcast over space."""
    a = as_tensor(a, "a")
    b = as_tensor(b, "b")
    if b.shape != a.shape and b.shape != (a.shape[0], 1, 1):
        raise ValueError(f"elementwise: incompatible shapes {a.shape} and {b.shape}")
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown elementwise kind {kind!r}")
