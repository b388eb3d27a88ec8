"""Distance maps and the near-edge mask (NEM) used to weight the loss."""

from __future__ import annotations

import numpy as np

from . import kernels


def as_mask(mask) -> np.ndarray:
    """Validate a 2-D binary mask and return it as a bool array."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
    if arr.dtype != bool:
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("mask pixels must be exactly 0 or 1")
        arr = arr.astype(bool)
    return np.ascontiguousarray(arr)


def distance_transform_sq(mask) -> np.ndarray:
    """Exact squared distance from each foreground pixel to the nearest
    background pixel, as int64. All zeros if there is no background."""
    fg = as_mask(mask)
    if not fg.any():
        return np.zeros(fg.shape, dtype=np.int64)
    d2 = kernels.edt_sq(fg)
    if d2[0, 0] < 0:
        return np.zeros(fg.shape, dtype=np.int64)
    return d2


def distance_transform(mask) -> np.ndarray:
    """Euclidean distance transform (foreground -> nearest background)."""
    return np.sqrt(distance_transform_sq(mask).astype(np.float64))


def edge_tf(dist, mask) -> np.ndarray:
    """``mask - minmax(dist)``: large just inside the boundary, zero at the
    deepest pixel and on the background.

    A constant ``dist`` normalises to 0 rather than 0/0.
    """
    dist = np.asarray(dist, dtype=np.float64)
    m = as_mask(mask)
    if dist.shape != m.shape:
        raise ValueError(f"edge_tf: dist shape {dist.shape} != mask shape {m.shape}")
    lo, hi = dist.min(), dist.max()
    if hi == lo:
        norm = np.zeros_like(dist)
    else:
        norm = (dist - lo) / (hi - lo)
    return m.astype(np.float64) - norm


def build_nem(gt) -> np.ndarray:
    """Near-edge mask: inner edge map (G - DI) plus outer edge map
    ((1-G) - DO). The two terms live on disjoint pixels, so values stay in
    [0, 1]. A uniform mask has no boundary and yields all zeros."""
    g = as_mask(gt)
    if g.all() or not g.any():
        return np.zeros(g.shape, dtype=np.float64)
    inv = ~g
    inner = edge_tf(distance_transform(g), g)
    outer = edge_tf(distance_transform(inv), inv)
    return inner + outer
