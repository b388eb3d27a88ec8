"""Slow, obviously-correct reference implementations.

Each function deliberately avoids the fast code path it is used to check.
"""

from __future__ import annotations

import numpy as np


def brute_edt_sq(mask) -> np.ndarray:
    """All-pairs squared distance from each foreground pixel to the nearest
    background pixel. Zeros when either class is empty."""
    m = np.asarray(mask, dtype=bool)
    out = np.zeros(m.shape, dtype=np.int64)
    fg = np.argwhere(m)
    bg = np.argwhere(~m)
    if len(fg) == 0 or len(bg) == 0:
        return out
    for start in range(0, len(fg), 512):
        chunk = fg[start:start + 512]
        d = chunk[:, None, :] - bg[None, :, :]
        sq = (d * d).sum(axis=2).min(axis=1)
        out[chunk[:, 0], chunk[:, 1]] = sq
    return out


def direct_conv2d(x, weight, bias, dilation) -> np.ndarray:
    """Nested-loop zero-padded convolution."""
    c_in, h, w = x.shape
    c_out, _, k, _ = weight.shape
    c = (k - 1) // 2
    out = np.zeros((c_out, h, w))
    for o in range(c_out):
        for y in range(h):
            for xx in range(w):
                acc = float(bias[o])
                for i in range(c_in):
                    for dy in range(k):
                        sy = y + dilation * (dy - c)
                        if not 0 <= sy < h:
                            continue
                        for dx in range(k):
                            sx = xx + dilation * (dx - c)
                            if 0 <= sx < w:
                                acc += float(weight[o, i, dy, dx]) * float(x[i, sy, sx])
                out[o, y, xx] = acc
    return out


def loop_newloss(gt, pred, nem, eta=1.0, eps=1e-7) -> float:
    """Scalar double loop over pixels."""
    import math

    h, w = np.shape(gt)
    total = 0.0
    for y in range(h):
        for x in range(w):
            p = float(gt[y][x])
            q = min(max(float(pred[y][x]), eps), 1.0 - eps)
            total += (float(nem[y][x]) + eta) * (p * math.log(q) + (1.0 - p) * math.log(1.0 - q))
    return -total / (h * w)


def fd_gradient(f, x, h=1e-5) -> np.ndarray:
    """Central finite differences of scalar ``f`` at every element of ``x``."""
    x = np.array(x, dtype=np.float64)
    grad = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + h
        fp = f(x)
        x[idx] = orig - h
        fm = f(x)
        x[idx] = orig
        grad[idx] = (fp - fm) / (2 * h)
    return grad


def count_confusion(pred, gt, t):
    """Per-pixel counting of (tp, fp, fn, tn) with positive iff pred >= t."""
    tp = fp = fn = tn = 0
    for p, g in zip(np.ravel(pred).tolist(), np.ravel(gt).tolist()):
        pos = p >= t
        if pos and g:
            tp += 1
        elif pos:
            fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def sweep_oracle(dataset, beta2=0.3, n_thresholds=256):
    """Exhaustive threshold loop; returns (precision, recall, f) arrays of
    dataset-mean per-image P/R and F from the means."""
    precision = np.zeros(n_thresholds)
    recall = np.zeros(n_thresholds)
    for i in range(n_thresholds):
        t = i / (n_thresholds - 1)
        for pred, gt in dataset:
            tp, fp, fn, _ = count_confusion(pred, gt, t)
            precision[i] += tp / (tp + fp) if tp + fp else 0.0
            recall[i] += tp / (tp + fn) if tp + fn else 0.0
    precision /= len(dataset)
    recall /= len(dataset)
    f = np.zeros(n_thresholds)
    for i in range(n_thresholds):
        den = beta2 * precision[i] + recall[i]
        f[i] = (1 + beta2) * precision[i] * recall[i] / den if den else 0.0
    return precision, recall, f
