"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat N]

Both implementations are imported directly, so the NEMSOD_NO_NUMBA flag
does not matter here. numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from nemsod.kernels import _numba, _numpy
from nemsod.cfdn import ToyNetworkConfig, build_network, network_forward
from nemsod.metrics import THRESHOLDS


def timeit(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    mask = rng.random((256, 256)) < 0.6
    yield "edt_sq 256x256", "edt_sq", (mask,)
    big = np.zeros((512, 512), dtype=bool)
    big[64:448, 96:400] = True
    yield "edt_sq 512x512 block", "edt_sq", (big,)
    for c, hw, k, d in [(16, 128, 3, 3), (8, 128, 3, 7), (64, 64, 1, 1), (3, 256, 3, 1)]:
        x = rng.standard_normal((c, hw, hw))
        w = rng.standard_normal((16, c, k, k))
        yield f"conv2d {c}x{hw}x{hw} k{k} d{d}", "conv2d", (x, w, np.zeros(16), d)
    pred = rng.random(256 * 256)
    gt = rng.random(256 * 256) < 0.5
    yield "threshold_hist 65536 px", "threshold_hist", (pred, gt, THRESHOLDS)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<30}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for label, name, fargs in cases(rng):
        t_np = timeit(getattr(_numpy, name), fargs, args.repeat)
        t_nb = timeit(getattr(_numba, name), fargs, args.repeat)
        print(f"{label:<30}{t_np * 1e3:>11.2f}{t_nb * 1e3:>11.2f}{t_np / t_nb:>8.1f}x")

    # end-to-end forward with whichever backend is active
    img = rng.uniform(-1, 1, (3, 256, 256))
    net = build_network(ToyNetworkConfig())
    t = timeit(network_forward, (img, net), max(1, args.repeat // 2))
    print(f"network_forward 3x256x256 (active backend): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
