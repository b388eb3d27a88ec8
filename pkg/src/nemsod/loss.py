"""NEM-weighted binary cross-entropy ("NEWLoss") and its gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .edt import as_mask, build_nem

DEFAULT_EPS = 1e-7


@dataclass(frozen=True)
class LossConfig:
    eta: float = 1.0
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must be in (0, 0.5), got {self.eps}")


def _check(gt, pred, nem=None):
    g = as_mask(gt).astype(np.float64)
    p = np.asarray(pred, dtype=np.float64)
    if p.shape != g.shape:
        raise ValueError(f"prediction shape {p.shape} != ground truth shape {g.shape}")
    if nem is not None:
        nem = np.asarray(nem, dtype=np.float64)
        if nem.shape != g.shape:
            raise ValueError(f"NEM shape {nem.shape} != ground truth shape {g.shape}")
    return g, p, nem


def bce_map(gt, pred, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Per-pixel log-likelihood ``p*ln(q) + (1-p)*ln(1-q)`` with the
    prediction clamped to [eps, 1-eps]. Values are <= 0; the sign flip
    happens in ``newloss``."""
    g, p, _ = _check(gt, pred)
    q = np.clip(p, eps, 1.0 - eps)
    return g * np.log(q) + (1.0 - g) * np.log1p(-q)


def _weights(g, nem, cfg):
    if cfg.eta == 0 and np.any(nem == 0):
        raise ValueError("eta must be > 0 when the NEM has zero entries")
    return nem + cfg.eta


def newloss(gt, pred, nem=None, cfg: LossConfig = LossConfig()) -> float:
    """Mean of ``-(NEM + eta) * BCE`` over all pixels.

    ``nem`` defaults to ``build_nem(gt)``.
    """
    g, p, nem = _check(gt, pred, nem)
    if g.size == 0:
        raise ValueError("empty maps")
    if nem is None:
        nem = build_nem(g)
    w = _weights(g, nem, cfg)
    return float(-np.sum(w * bce_map(g, p, cfg.eps)) / g.size)


def bce_loss(gt, pred, eps: float = DEFAULT_EPS) -> float:
    """Plain (unweighted) mean BCE, for comparison."""
    b = bce_map(gt, pred, eps)
    return float(-np.sum(b) / b.size)


def newloss_grad(gt, pred, nem=None, cfg: LossConfig = LossConfig()) -> np.ndarray:
    """Analytic d(newloss)/d(pred). Zero wherever the clamp is active."""
    g, p, nem = _check(gt, pred, nem)
    if nem is None:
        nem = build_nem(g)
    w = _weights(g, nem, cfg)
    q = np.clip(p, cfg.eps, 1.0 - cfg.eps)
    grad = -w / g.size * (g / q - (1.0 - g) / (1.0 - q))
    grad[(p < cfg.eps) | (p > 1.0 - cfg.eps)] = 0.0
    return grad
