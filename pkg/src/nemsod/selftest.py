"""Seeded oracle suites run by ``nemsod selftest``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracles
from .edt import distance_transform_sq
from .loss import LossConfig, newloss, newloss_grad
from .metrics import THRESHOLDS, sweep_counts
from .tensor import ConvParams, conv2d


@dataclass
class SuiteResult:
    name: str
    passed: bool
    instances: int
    max_error: float
    failing_seed: int | None = None


def _random_mask(rng, max_side=32):
    h, w = rng.integers(1, max_side + 1, size=2)
    return rng.random((h, w)) < rng.uniform(0.1, 0.9)


def suite_edt(seed, n=40, fault=False):
    worst = 0.0
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        m = _random_mask(rng)
        got = distance_transform_sq(m)
        if fault:
            got = got + 1
        err = float(np.abs(got - oracles.brute_edt_sq(m)).max())
        worst = max(worst, err)
        if err != 0:
            return SuiteResult("edt", False, i + 1, worst, seed)
    return SuiteResult("edt", True, n, worst)


def suite_gradient(seed, n=20, tol=1e-5):
    worst = 0.0
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        gt = rng.random((8, 8)) < 0.5
        pred = rng.uniform(0.01, 0.99, size=(8, 8))
        nem = rng.random((8, 8))
        cfg = LossConfig(eta=1.0)
        g = newloss_grad(gt, pred, nem, cfg)
        fd = oracles.fd_gradient(lambda q: newloss(gt, q, nem, cfg), pred)
        err = float(np.max(np.abs(g - fd) / np.abs(g)))
        worst = max(worst, err)
        if err > tol:
            return SuiteResult("gradient", False, i + 1, worst, seed)
    return SuiteResult("gradient", True, n, worst)


def suite_conv(seed, n=12, tol=1e-6):
    worst = 0.0
    dilations = (1, 3, 7)
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        c_in, c_out = rng.integers(1, 4, size=2)
        h, w = rng.integers(1, 12, size=2)
        k = 3 if i % 4 else 1
        d = dilations[i % 3]
        x = rng.standard_normal((c_in, h, w))
        p = ConvParams(rng.standard_normal((c_out, c_in, k, k)), rng.standard_normal(c_out), d)
        err = float(np.abs(conv2d(x, p) - oracles.direct_conv2d(x, p.weights, p.bias, d)).max())
        worst = max(worst, err)
        if err > tol:
            return SuiteResult("conv", False, i + 1, worst, seed)
    return SuiteResult("conv", True, n, worst)


def suite_metrics(seed, n=6):
    worst = 0.0
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        h, w = rng.integers(1, 17, size=2)
        gt = rng.random((h, w)) < 0.4
        # mix in exact threshold values to exercise the >= boundary
        pred = np.where(rng.random((h, w)) < 0.3,
                        THRESHOLDS[rng.integers(0, 256, size=(h, w))],
                        rng.random((h, w)))
        tp, fp, _, _ = sweep_counts(pred, gt)
        for j in range(0, 256, 5):
            otp, ofp, _, _ = oracles.count_confusion(pred, gt, THRESHOLDS[j])
            err = float(abs(tp[j] - otp) + abs(fp[j] - ofp))
            worst = max(worst, err)
            if err:
                return SuiteResult("metrics", False, i + 1, worst, seed)
    return SuiteResult("metrics", True, n, worst)


def run_all(seed: int = 0, fault: str | None = None) -> list:
    return [
        suite_edt(seed, fault=(fault == "edt")),
        suite_gradient(seed),
        suite_conv(seed),
        suite_metrics(seed),
    ]
