import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from nemsod.metrics import (
    THRESHOLDS,
    adaptive_f,
    evaluate,
    f_measures,
    mae,
    pr_curve,
    s_measure,
    sweep_counts,
    threshold_confusion,
)
from nemsod.oracles import count_confusion, sweep_oracle


def scalar_s_measure(pred, gt, alpha=0.5):
    """Pixel-list evaluation of the structure measure."""
    h, w = len(gt), len(gt[0])
    cells = [(y, x) for y in range(h) for x in range(w)]
    fg = [pred[y][x] for y, x in cells if gt[y][x]]
    bg = [1 - pred[y][x] for y, x in cells if not gt[y][x]]
    n = h * w
    if not fg:
        return 1 - sum(pred[y][x] for y, x in cells) / n
    if not bg:
        return sum(fg) / n

    def obj(v):
        m = sum(v) / len(v)
        sd = math.sqrt(sum((a - m) ** 2 for a in v) / len(v))
        return 2 * m / (m * m + 1 + 2 * sd)

    mu = len(fg) / n
    s_obj = mu * obj(fg) + (1 - mu) * obj(bg)
    cy = math.floor(sum(y for y, x in cells if gt[y][x]) / len(fg) + 0.5) + 1
    cx = math.floor(sum(x for y, x in cells if gt[y][x]) / len(fg) + 0.5) + 1
    s_reg = 0.0
    for ys in (range(0, min(cy, h)), range(min(cy, h), h)):
        for xs in (range(0, min(cx, w)), range(min(cx, w), w)):
            q = [(y, x) for y in ys for x in xs]
            if not q:
                continue
            a = [pred[y][x] for y, x in q]
            b = [float(gt[y][x]) for y, x in q]
            ma, mb = sum(a) / len(q), sum(b) / len(q)
            va = sum((v - ma) ** 2 for v in a) / len(q)
            vb = sum((v - mb) ** 2 for v in b) / len(q)
            cab = sum((u - ma) * (v - mb) for u, v in zip(a, b)) / len(q)
            num = 4 * ma * mb * cab
            den = (ma ** 2 + mb ** 2) * (va + vb)
            score = (1.0 if num == 0 and ma == mb else 0.0) if den == 0 else num / den
            s_reg += len(q) / n * score
    return min(max(alpha * s_obj + (1 - alpha) * s_reg, 0.0), 1.0)


class TestMAE:
    def test_cases(self, rng):
        gt = rng.random((7, 9)) < 0.5
        assert mae(gt.astype(float), gt) == 0
        assert mae(np.full(gt.shape, 0.5), gt) == 0.5
        assert mae(1.0 - gt, gt) == 1

    def test_errors(self):
        with pytest.raises(ValueError):
            mae(np.zeros((2, 2)), np.zeros((2, 3)))
        with pytest.raises(ValueError):
            mae(np.full((2, 2), 1.5), np.zeros((2, 2)))

    def test_monotone_degradation(self, rng):
        gt = rng.random((16, 16)) < 0.5
        pred = np.where(gt, 0.8, 0.2)
        order = rng.permutation(gt.size)
        prev = mae(pred, gt)
        for k in range(0, gt.size, 17):
            flipped = pred.copy().ravel()
            idx = order[:k]
            flipped[idx] = 1.0 - gt.ravel()[idx]
            cur = mae(flipped.reshape(gt.shape), gt)
            assert cur >= prev
            prev = cur


class TestConfusion:
    def test_zero_threshold(self, rng):
        gt = rng.random((6, 6)) < 0.3
        c = threshold_confusion(rng.random((6, 6)), gt, 0.0)
        assert c == (gt.sum(), (~gt).sum(), 0, 0)

    def test_perfect(self, rng):
        gt = rng.random((6, 6)) < 0.3
        for t in (1e-9, 0.3, 1.0):
            c = threshold_confusion(gt.astype(float), gt, t)
            assert c.fp == 0 and c.fn == 0

    def test_matches_counting_oracle(self, rng):
        gt = rng.random((16, 16)) < 0.5
        pred = rng.random((16, 16))
        for t in np.linspace(0, 1, 23):
            c = threshold_confusion(pred, gt, t)
            assert tuple(c) == count_confusion(pred, gt, t)
            assert sum(c) == 256

    def test_sweep_reconciles(self, rng):
        gt = rng.random((20, 11)) < 0.5
        pred = rng.random((20, 11))
        tp, fp, n_fg, n_bg = sweep_counts(pred, gt)
        for i in range(256):
            c = threshold_confusion(pred, gt, THRESHOLDS[i])
            assert (tp[i], fp[i]) == (c.tp, c.fp)
            assert c.tp + c.fn == n_fg and c.fp + c.tn == n_bg


class TestFMeasure:
    def test_perfect(self, rng):
        gt = rng.random((10, 10)) < 0.4
        max_f, mean_f, sweep = f_measures([(gt.astype(float), gt)])
        assert max_f == 1.0
        np.testing.assert_array_equal(sweep.f[1:], 1.0)

    def test_empty_prediction(self, rng):
        gt = rng.random((10, 10)) < 0.4
        gt[0, 0] = True
        max_f, mean_f, sweep = f_measures([(np.zeros((10, 10)), gt)])
        assert (sweep.recall[1:] == 0).all()
        # at t=0 every pixel is positive, so recall is 1 there
        assert sweep.recall[0] == 1
        assert max_f >= mean_f

    def test_empty_dataset(self):
        with pytest.raises(ValueError):
            f_measures([])
        with pytest.raises(ValueError):
            pr_curve([])

    def test_matches_oracle(self, rng):
        data = [(rng.random((h, w)), rng.random((h, w)) < 0.4) for h, w in [(9, 12), (7, 7), (13, 5)]]
        p, r, f = sweep_oracle(data)
        max_f, mean_f, sweep = f_measures(data)
        np.testing.assert_allclose(sweep.precision, p, atol=1e-9, rtol=0)
        np.testing.assert_allclose(sweep.recall, r, atol=1e-9, rtol=0)
        np.testing.assert_allclose(sweep.f, f, atol=1e-9, rtol=0)
        assert max_f == pytest.approx(f.max(), abs=1e-9)
        assert mean_f == pytest.approx(f.mean(), abs=1e-9)

    def test_adaptive_mode(self, rng):
        gt = rng.random((12, 12)) < 0.4
        pred = np.clip(gt * 0.6 + rng.random((12, 12)) * 0.4, 0, 1)
        _, mean_f, _ = f_measures([(pred, gt)], mu_f_mode="adaptive")
        t = min(2 * pred.mean(), 1.0)
        tp, fp, fn, _ = count_confusion(pred, gt, t)
        prec, rec = tp / (tp + fp), tp / (tp + fn)
        assert mean_f == pytest.approx(1.3 * prec * rec / (0.3 * prec + rec), abs=1e-12)
        assert adaptive_f(pred, gt) == mean_f
        with pytest.raises(ValueError):
            f_measures([(pred, gt)], mu_f_mode="median")


class TestPRCurve:
    def test_perfect_dataset(self, rng):
        data = [(g.astype(float), g) for g in (rng.random((8, 8)) < 0.5 for _ in range(3))]
        sweep = pr_curve(data)
        np.testing.assert_array_equal(sweep.precision[1:], 1.0)

    def test_binary_prediction_two_points(self, rng):
        gt = rng.random((16, 16)) < 0.5
        pred = (rng.random((16, 16)) < 0.5).astype(float)
        sweep = pr_curve([(pred, gt)])
        points = set(zip(sweep.recall.tolist(), sweep.precision.tolist()))
        # t = 0: all positive; t in (0, 1]: exactly the predicted pixels
        tp, fp, fn, _ = count_confusion(pred, gt, 0.5)
        assert points == {(1.0, gt.mean()), (tp / (tp + fn), tp / (tp + fp))}

    def test_noise_matches_oracle(self, rng):
        data = [(rng.random((10, 10)), rng.random((10, 10)) < 0.5) for _ in range(2)]
        p, r, _ = sweep_oracle(data)
        sweep = pr_curve(data)
        np.testing.assert_allclose(sweep.precision, p, atol=1e-9, rtol=0)
        np.testing.assert_allclose(sweep.recall, r, atol=1e-9, rtol=0)


class TestSMeasure:
    def test_perfect(self, rng):
        gt = rng.random((12, 15)) < 0.5
        assert s_measure(gt.astype(float), gt) == pytest.approx(1.0, abs=1e-12)

    def test_all_background(self):
        assert s_measure(np.full((4, 4), 0.3), np.zeros((4, 4))) == pytest.approx(0.7)
        assert s_measure(np.full((4, 4), 0.3), np.ones((4, 4))) == pytest.approx(0.3)

    def test_inverted_half_plane(self):
        gt = np.zeros((10, 10), dtype=bool)
        gt[:, :5] = True
        assert s_measure(1.0 - gt, gt) < s_measure(gt.astype(float), gt)

    def test_matches_scalar(self, rng):
        for _ in range(20):
            h, w = rng.integers(2, 14, size=2)
            gt = rng.random((h, w)) < rng.uniform(0.1, 0.9)
            pred = rng.random((h, w))
            expect = scalar_s_measure(pred.tolist(), gt.tolist())
            assert s_measure(pred, gt) == pytest.approx(expect, abs=1e-12)

    def test_alpha(self, rng):
        with pytest.raises(ValueError):
            s_measure(np.zeros((2, 2)), np.zeros((2, 2)), alpha=1.5)


datasets = st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(st.integers(1, 10), st.integers(1, 10)).flatmap(lambda s: st.tuples(
        hnp.arrays(np.float64, s, elements=st.floats(0, 1)),
        hnp.arrays(bool, s))),
    min_size=n, max_size=n))


@settings(max_examples=60, deadline=None)
@given(datasets)
def test_metric_invariants(data):
    rep = evaluate(data)
    for v in (rep.mae, rep.max_f, rep.mean_f, rep.s_measure):
        assert 0.0 <= v <= 1.0
    assert rep.max_f >= rep.mean_f
    sw = rep.sweep
    assert (np.diff(sw.recall) <= 0).all()
    assert ((sw.precision >= 0) & (sw.precision <= 1)).all()
