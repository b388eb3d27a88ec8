"""numba implementations of the hot loops.

Every kernel here has a twin in ``_numpy`` with the same signature and
the same result (bit-identical for the integer kernels, within float
rounding for ``conv2d``).
"""

import numpy as np

from .._accel import njit


@njit
def edt_sq(fg):
    """Exact squared Euclidean distance of each ``fg`` pixel to the nearest
    non-``fg`` pixel (0 on non-``fg`` pixels).

    Column pass by two linear sweeps, then a row pass with the lower
    envelope of parabolas. Envelope breakpoints are kept as integer
    fractions so every comparison is exact. Returns -1 everywhere when
    ``fg`` has no background pixel.
    """
    h, w = fg.shape
    inf = h + w + 1
    g = np.empty((h, w), dtype=np.int64)
    for x in range(w):
        d = inf
        for y in range(h):
            if not fg[y, x]:
                d = 0
            elif d < inf:
                d += 1
            g[y, x] = d
        d = inf
        for y in range(h - 1, -1, -1):
            if not fg[y, x]:
                d = 0
            elif d < inf:
                d += 1
            if d < g[y, x]:
                g[y, x] = d

    out = np.empty((h, w), dtype=np.int64)
    v = np.empty(w, dtype=np.int64)
    zn = np.empty(w, dtype=np.int64)
    zd = np.empty(w, dtype=np.int64)
    for y in range(h):
        k = -1
        for q in range(w):
            gq = g[y, q]
            if gq >= inf:
                continue
            if k < 0:
                k = 0
                v[0] = q
                continue
            fq = gq * gq + q * q
            while True:
                p = v[k]
                num = fq - (g[y, p] * g[y, p] + p * p)
                den = 2 * (q - p)
                # z[0] is -inf, nothing to pop below it
                if k == 0 or num * zd[k] > zn[k] * den:
                    break
                k -= 1
            k += 1
            v[k] = q
            zn[k] = num
            zd[k] = den
        if k < 0:
            for q in range(w):
                out[y, q] = -1
            continue
        j = 0
        for q in range(w):
            while j < k and zn[j + 1] < q * zd[j + 1]:
                j += 1
            p = v[j]
            out[y, q] = (q - p) * (q - p) + g[y, p] * g[y, p]
    return out


@njit
def conv2d(x, weight, bias, dilation):
    """Stride-1 "same" convolution, zero padded, float64 accumulation.

    Gathers dilated taps into an im2col matrix, then one matmul.
    """
    c_in, h, w = x.shape
    c_out = weight.shape[0]
    k = weight.shape[2]
    c = (k - 1) // 2
    cols = np.zeros((c_in * k * k, h * w), dtype=np.float64)
    r = 0
    for i in range(c_in):
        for ky in range(k):
            dy = dilation * (ky - c)
            y0 = max(0, -dy)
            y1 = min(h, h - dy)
            for kx in range(k):
                dx = dilation * (kx - c)
                x0 = max(0, -dx)
                x1 = min(w, w - dx)
                for yy in range(y0, y1):
                    base = yy * w
                    for xx in range(x0, x1):
                        cols[r, base + xx] = x[i, yy + dy, xx + dx]
                r += 1
    wmat = np.ascontiguousarray(weight.reshape(c_out, c_in * k * k))
    out = np.dot(wmat, cols)
    for o in range(c_out):
        out[o] += bias[o]
    return out.reshape(c_out, h, w)


@njit
def threshold_hist(pred, gt, thresholds):
    """Histogram of the highest satisfied threshold index per pixel, split
    by ground-truth class. ``pred`` and ``gt`` are flat; thresholds sorted
    ascending with thresholds[0] <= min(pred)."""
    n_t = thresholds.shape[0]
    scale = n_t - 1
    fg = np.zeros(n_t, dtype=np.int64)
    bg = np.zeros(n_t, dtype=np.int64)
    for idx in range(pred.shape[0]):
        p = pred[idx]
        k = int(p * scale)
        if k > scale:
            k = scale
        elif k < 0:
            k = 0
        while k < scale and thresholds[k + 1] <= p:
            k += 1
        while k > 0 and thresholds[k] > p:
            k -= 1
        if gt[idx]:
            fg[k] += 1
        else:
            bg[k] += 1
    return fg, bg
