"""Pure-numpy versions of the kernels in ``_numba``."""

import numpy as np

# cap on the (rows, w, w) broadcast in the EDT row pass
_EDT_CHUNK = 1 << 22


def edt_sq(fg):
    fg = np.asarray(fg, dtype=bool)
    h, w = fg.shape
    if fg.all():
        return np.full((h, w), -1, dtype=np.int64)
    inf = h + w + 1
    g = np.empty((h, w), dtype=np.int64)
    d = np.full(w, inf, dtype=np.int64)
    for y in range(h):
        d = np.where(fg[y], np.minimum(d + 1, inf), 0)
        g[y] = d
    d = np.full(w, inf, dtype=np.int64)
    for y in range(h - 1, -1, -1):
        d = np.where(fg[y], np.minimum(d + 1, inf), 0)
        g[y] = np.minimum(g[y], d)

    # row pass: out[y, q] = min_p g[y, p]^2 + (q - p)^2 over finite g
    big = np.int64(4 * inf * inf)
    f = np.where(g < inf, g * g, big)
    cols = np.arange(w, dtype=np.int64)
    sq = (cols[:, None] - cols[None, :]) ** 2
    out = np.empty((h, w), dtype=np.int64)
    step = max(1, _EDT_CHUNK // max(1, w * w))
    for y0 in range(0, h, step):
        y1 = min(h, y0 + step)
        out[y0:y1] = (f[y0:y1, None, :] + sq[None, :, :]).min(axis=2)
    return out


def conv2d(x, weight, bias, dilation):
    c_in, h, w = x.shape
    c_out, _, k, _ = weight.shape
    pad = dilation * (k - 1) // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    out = np.empty((c_out, h, w), dtype=np.float64)
    out[:] = bias[:, None, None]
    for ky in range(k):
        for kx in range(k):
            patch = xp[:, ky * dilation:ky * dilation + h, kx * dilation:kx * dilation + w]
            out += np.tensordot(weight[:, :, ky, kx], patch, axes=(1, 0))
    return out


def threshold_hist(pred, gt, thresholds):
    n_t = thresholds.shape[0]
    k = np.searchsorted(thresholds, pred, side="right") - 1
    np.clip(k, 0, n_t - 1, out=k)
    gt = np.asarray(gt, dtype=bool)
    fg = np.bincount(k[gt], minlength=n_t).astype(np.int64)
    bg = np.bincount(k[~gt], minlength=n_t).astype(np.int64)
    return fg, bg
