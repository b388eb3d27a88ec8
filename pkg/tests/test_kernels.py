"""numba and numpy kernel twins against each other and the oracles."""

import numpy as np
import pytest

from nemsod.oracles import brute_edt_sq, count_confusion, direct_conv2d
from nemsod.metrics import THRESHOLDS

from conftest import fixtures, random_mask


def test_edt_matches_bruteforce(kernel_impl, rng):
    for _ in range(60):
        m = random_mask(rng, 40)
        if m.all():
            continue
        np.testing.assert_array_equal(kernel_impl.edt_sq(m), brute_edt_sq(m))


@pytest.mark.parametrize("name,mask", [(k, v) for k, v in fixtures().items() if not v.all()])
def test_edt_fixtures(kernel_impl, name, mask):
    np.testing.assert_array_equal(kernel_impl.edt_sq(mask), brute_edt_sq(mask))


def test_edt_all_foreground_sentinel(kernel_impl):
    assert (kernel_impl.edt_sq(np.ones((4, 5), dtype=bool)) == -1).all()


def test_edt_backends_identical(rng):
    from nemsod.kernels import _numba, _numpy
    m = rng.random((97, 131)) < 0.7
    np.testing.assert_array_equal(_numba.edt_sq(m), _numpy.edt_sq(m))


@pytest.mark.parametrize("dilation", [1, 3, 7])
def test_conv_matches_direct(kernel_impl, rng, dilation):
    x = rng.standard_normal((2, 9, 11))
    w = rng.standard_normal((3, 2, 3, 3))
    b = rng.standard_normal(3)
    np.testing.assert_allclose(kernel_impl.conv2d(x, w, b, dilation),
                               direct_conv2d(x, w, b, dilation), atol=1e-12)


def test_conv_backends_agree(rng):
    from nemsod.kernels import _numba, _numpy
    x = rng.standard_normal((5, 33, 17))
    w = rng.standard_normal((4, 5, 3, 3))
    b = rng.standard_normal(4)
    np.testing.assert_allclose(_numba.conv2d(x, w, b, 7), _numpy.conv2d(x, w, b, 7), atol=1e-12)


def test_threshold_hist_counts(kernel_impl, rng):
    pred = np.concatenate([rng.random(300), THRESHOLDS, [0.0, 1.0, np.nextafter(THRESHOLDS[7], 0)]])
    gt = rng.random(pred.size) < 0.5
    fg, bg = kernel_impl.threshold_hist(pred, gt, THRESHOLDS)
    assert fg.sum() + bg.sum() == pred.size
    tp = np.cumsum(fg[::-1])[::-1]
    fp = np.cumsum(bg[::-1])[::-1]
    for i in range(0, 256, 3):
        otp, ofp, _, _ = count_confusion(pred, gt, THRESHOLDS[i])
        assert (tp[i], fp[i]) == (otp, ofp)


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys

    env = dict(os.environ, NEMSOD_NO_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import nemsod.kernels as k, nemsod; print(nemsod.backend_name(), k.edt_sq.__module__)"],
        env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out[0] == expected
    assert out[1].endswith("_" + expected)
