"""Saliency evaluation: MAE, max/mean F-measure, S-measure, PR curve."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .edt import as_mask

N_THRESHOLDS = 256
THRESHOLDS = np.arange(N_THRESHOLDS, dtype=np.float64) / (N_THRESHOLDS - 1)
DEFAULT_BETA2 = 0.3
MU_F_MODES = ("sweep", "adaptive")


class Confusion(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass
class ThresholdSweep:
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f: np.ndarray


@dataclass
class ImageScores:
    name: str
    mae: float
    s_measure: float
    max_f: float
    adaptive_f: float


@dataclass
class MetricsReport:
    mae: float
    max_f: float
    mean_f: float
    s_measure: float
    sweep: ThresholdSweep
    per_image: list = field(default_factory=list)


def _pair(pred, gt):
    p = np.asarray(pred, dtype=np.float64)
    g = as_mask(gt)
    if p.shape != g.shape:
        raise ValueError(f"prediction shape {p.shape} != ground truth shape {g.shape}")
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise ValueError("prediction values must lie in [0, 1]")
    return p, g


def mae(pred, gt) -> float:
    p, g = _pair(pred, gt)
    return float(np.mean(np.abs(p - g)))


def threshold_confusion(pred, gt, t: float) -> Confusion:
    """Confusion counts with the rule: positive iff pred >= t."""
    p, g = _pair(pred, gt)
    pos = p >= t
    tp = int(np.count_nonzero(pos & g))
    fp = int(np.count_nonzero(pos & ~g))
    fn = int(np.count_nonzero(~pos & g))
    return Confusion(tp, fp, fn, g.size - tp - fp - fn)


def sweep_counts(pred, gt):
    """tp and fp at each of the 256 thresholds, plus #fg and #bg."""
    p, g = _pair(pred, gt)
    fg_hist, bg_hist = kernels.threshold_hist(
        np.ascontiguousarray(p.ravel()), np.ascontiguousarray(g.ravel()), THRESHOLDS)
    # pixels positive at threshold i are those whose top satisfied index >= i
    tp = np.cumsum(fg_hist[::-1])[::-1]
    fp = np.cumsum(bg_hist[::-1])[::-1]
    return tp, fp, int(g.sum()), int(g.size - g.sum())


def _ratio(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0)
    return out


def precision_recall(pred, gt):
    tp, fp, n_fg, _ = sweep_counts(pred, gt)
    return _ratio(tp, tp + fp), _ratio(tp, n_fg)


def f_score(precision, recall, beta2: float = DEFAULT_BETA2):
    precision = np.asarray(precision, dtype=np.float64)
    recall = np.asarray(recall, dtype=np.float64)
    return _ratio((1.0 + beta2) * precision * recall, beta2 * precision + recall)


def _check_dataset(dataset):
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset is empty")
    return dataset


def pr_curve(dataset: Sequence, beta2: float = DEFAULT_BETA2) -> ThresholdSweep:
    """Dataset-mean of per-image precision and recall at 256 thresholds."""
    dataset = _check_dataset(dataset)
    precision = np.zeros(N_THRESHOLDS)
    recall = np.zeros(N_THRESHOLDS)
    for pred, gt in dataset:
        p, r = precision_recall(pred, gt)
        precision += p
        recall += r
    precision /= len(dataset)
    recall /= len(dataset)
    return ThresholdSweep(THRESHOLDS.copy(), precision, recall, f_score(precision, recall, beta2))


def adaptive_f(pred, gt, beta2: float = DEFAULT_BETA2) -> float:
    """F-measure at threshold min(2 * mean(pred), 1)."""
    p, g = _pair(pred, gt)
    c = threshold_confusion(p, g, min(2.0 * float(p.mean()), 1.0))
    prec = _ratio(c.tp, c.tp + c.fp)
    rec = _ratio(c.tp, c.tp + c.fn)
    return float(f_score(prec, rec, beta2))


def f_measures(dataset: Sequence, beta2: float = DEFAULT_BETA2, mu_f_mode: str = "sweep"):
    """Return (max_f, mean_f, sweep).

    ``mu_f_mode='sweep'`` averages the dataset F curve over thresholds;
    ``'adaptive'`` averages per-image adaptive-threshold F instead.
    """
    if mu_f_mode not in MU_F_MODES:
        raise ValueError(f"mu_f_mode must be one of {MU_F_MODES}")
    dataset = _check_dataset(dataset)
    sweep = pr_curve(dataset, beta2)
    max_f = float(sweep.f.max())
    if mu_f_mode == "sweep":
        mean_f = float(sweep.f.mean())
    else:
        mean_f = float(np.mean([adaptive_f(p, g, beta2) for p, g in dataset]))
    return max_f, mean_f, sweep


def _object_score(x: np.ndarray) -> float:
    if x.size == 0:
        return 0.0
    mean = float(x.mean())
    sigma = float(x.std())
    lam = 1.0
    return 2.0 * mean / (mean * mean + 1.0 + 2.0 * lam * sigma)


def _s_object(p, g):
    mu = g.mean()
    fg = _object_score(p[g])
    bg = _object_score(1.0 - p[~g])
    return mu * fg + (1.0 - mu) * bg


def _ssim(x: np.ndarray, y: np.ndarray) -> float:
    mx, my = x.mean(), y.mean()
    vx = ((x - mx) ** 2).mean()
    vy = ((y - my) ** 2).mean()
    cxy = ((x - mx) * (y - my)).mean()
    num = 4.0 * mx * my * cxy
    den = (mx * mx + my * my) * (vx + vy)
    if den == 0:
        return 1.0 if num == 0 and mx == my else 0.0
    return float(num / den)


def _s_region(p, g):
    h, w = g.shape
    rows, cols = np.nonzero(g)
    # split after the centroid pixel
    cy = min(max(int(np.floor(rows.mean() + 0.5)) + 1, 0), h)
    cx = min(max(int(np.floor(cols.mean() + 0.5)) + 1, 0), w)
    total = float(h * w)
    score = 0.0
    for ys in (slice(0, cy), slice(cy, h)):
        for xs in (slice(0, cx), slice(cx, w)):
            gq = g[ys, xs]
            if gq.size == 0:
                continue
            score += gq.size / total * _ssim(p[ys, xs], gq.astype(np.float64))
    return score


def s_measure(pred, gt, alpha: float = 0.5) -> float:
    """Structure measure: alpha * object score + (1 - alpha) * region score."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    p, g = _pair(pred, gt)
    if not g.any():
        return float(1.0 - p.mean())
    if g.all():
        return float(p.mean())
    s = alpha * _s_object(p, g) + (1.0 - alpha) * _s_region(p, g)
    return float(min(max(s, 0.0), 1.0))


def evaluate(dataset: Sequence, names: Sequence[str] | None = None,
             beta2: float = DEFAULT_BETA2, mu_f_mode: str = "sweep",
             alpha: float = 0.5) -> MetricsReport:
    dataset = _check_dataset(dataset)
    if names is None:
        names = [str(i) for i in range(len(dataset))]
    max_f, mean_f, sweep = f_measures(dataset, beta2, mu_f_mode)
    per_image = []
    for name, (p, g) in zip(names, dataset):
        pr, rc = precision_recall(p, g)
        per_image.append(ImageScores(
            name=name,
            mae=mae(p, g),
            s_measure=s_measure(p, g, alpha),
            max_f=float(f_score(pr, rc, beta2).max()),
            adaptive_f=adaptive_f(p, g, beta2),
        ))
    # fixed-order reductions
    return MetricsReport(
        mae=float(np.mean([s.mae for s in per_image])),
        max_f=max_f,
        mean_f=mean_f,
        s_measure=float(np.mean([s.s_measure for s in per_image])),
        sweep=sweep,
        per_image=per_image,
    )
