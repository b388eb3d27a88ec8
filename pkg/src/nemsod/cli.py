"""Command-line front end.

Exit codes: 0 success, 1 partial or test failure, 2 usage / input
contract violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend_name
from .cfdn import ToyNetworkConfig, build_network, network_forward
from .edt import build_nem
from .loss import LossConfig, bce_loss, newloss
from .metrics import DEFAULT_BETA2, MU_F_MODES, N_THRESHOLDS, evaluate
from .netpbm import NetpbmError, load_image, load_mask, save_map
from .selftest import run_all

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2
MASK_SUFFIXES = (".pgm",)


class UsageError(Exception):
    pass


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _fmt(v: float) -> str:
    return repr(float(v))


def _list_masks(directory) -> dict:
    d = Path(directory)
    if not d.is_dir():
        raise UsageError(f"not a directory: {d}")
    files = {}
    for p in sorted(d.iterdir()):
        if p.is_file() and p.suffix.lower() in MASK_SUFFIXES:
            if p.stem in files:
                raise UsageError(f"duplicate stem {p.stem!r} in {d}")
            files[p.stem] = p
    return files


def pair_dataset(pred_dir, gt_dir) -> list:
    """(stem, pred path, gt path) sorted by stem; orphans are an error."""
    preds = _list_masks(pred_dir)
    gts = _list_masks(gt_dir)
    orphans = sorted(set(preds) ^ set(gts))
    if orphans or not preds:
        detail = ", ".join(orphans) if orphans else "no masks found"
        raise UsageError(f"unmatched stems between {pred_dir} and {gt_dir}: {detail}")
    return [(s, preds[s], gts[s]) for s in sorted(preds)]


def _workers(threads) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    n = int(threads)
    if n < 1:
        raise UsageError("--threads must be >= 1 or 'auto'")
    return n


def _map(fn, items, threads):
    # executor.map preserves input order, so output is independent of workers
    n = _workers(threads)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_nem(args) -> int:
    masks = _list_masks(args.gt_dir)
    if not masks:
        raise UsageError(f"no .pgm masks in {args.gt_dir}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(item):
        stem, path = item
        try:
            nem = build_nem(load_mask(path, binarize=True))
        except NetpbmError as exc:
            return stem, None, str(exc)
        save_map(nem, out_dir / f"{stem}.pgm")
        return stem, {"min": float(nem.min()), "max": float(nem.max()), "mean": float(nem.mean())}, None

    stats, failures = {}, []
    for stem, st, err in _map(work, list(masks.items()), args.threads):
        if err:
            failures.append(err)
        else:
            stats[stem] = st
    _dump_json({"version": __version__, "images": stats}, out_dir / "nem_stats.json")
    for f in failures:
        _err(f)
    print(f"wrote {len(stats)} NEM map(s) to {out_dir}; {len(failures)} failure(s)")
    return EXIT_PARTIAL if failures else EXIT_OK


def _load_pairs(pairs, threads):
    def work(item):
        stem, pp, gp = item
        return stem, load_mask(pp), load_mask(gp, binarize=True)

    return _map(work, pairs, threads)


def cmd_loss(args) -> int:
    pairs = pair_dataset(args.pred_dir, args.gt_dir)
    cfg = LossConfig(eta=args.eta)
    data = _load_pairs(pairs, args.threads)

    def work(item):
        stem, pred, gt = item
        if pred.shape != gt.shape:
            raise UsageError(f"{stem}: prediction {pred.shape} vs ground truth {gt.shape}")
        return stem, newloss(gt, pred, build_nem(gt), cfg), bce_loss(gt, pred)

    rows = _map(work, data, args.threads)
    out = ["image,newloss,bce"]
    out += [f"{s},{_fmt(a)},{_fmt(b)}" for s, a, b in rows]
    out.append(f"mean,{_fmt(np.mean([r[1] for r in rows]))},{_fmt(np.mean([r[2] for r in rows]))}")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    pairs = pair_dataset(args.pred_dir, args.gt_dir)
    data = _load_pairs(pairs, args.threads)
    for stem, p, g in data:
        if p.shape != g.shape:
            raise UsageError(f"{stem}: prediction {p.shape} vs ground truth {g.shape}")
    rep = evaluate([(p, g) for _, p, g in data], names=[s for s, _, _ in data],
                   beta2=args.beta2, mu_f_mode=args.mu_f_mode)
    report = {
        "dataset": args.name or Path(args.gt_dir).name,
        "images": len(data),
        "version": __version__,
        "config": {
            "beta2": args.beta2,
            "eta": args.eta,
            "thresholds": N_THRESHOLDS,
            "threshold_rule": "pred >= i/255",
            "gt_binarize": "v >= 128",
            "mu_f_mode": args.mu_f_mode,
            "s_alpha": 0.5,
            "orientation": {"mae": "lower is better", "max_f": "higher is better",
                            "mean_f": "higher is better", "s_measure": "higher is better"},
        },
        "mae": rep.mae,
        "max_f": rep.max_f,
        "mean_f": rep.mean_f,
        "s_measure": rep.s_measure,
        "per_image": [
            {"image": s.name, "mae": s.mae, "s_measure": s.s_measure,
             "max_f": s.max_f, "adaptive_f": s.adaptive_f}
            for s in rep.per_image
        ],
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _dump_json(report, out)
    pr_path = Path(args.pr_csv) if args.pr_csv else out.with_name(out.stem + "_pr.csv")
    sw = rep.sweep
    lines = ["threshold,precision,recall,f"]
    for t, p, r, f in zip(sw.thresholds, sw.precision, sw.recall, sw.f):
        lines.append(f"{_fmt(t)},{_fmt(p)},{_fmt(r)},{_fmt(f)}")
    pr_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    print(f"{'dataset':<16}{'n':>5}{'MAE':>9}{'mF':>9}{'muF':>9}{'S':>9}")
    print(f"{report['dataset']:<16}{len(data):>5}{rep.mae:>9.4f}{rep.max_f:>9.4f}"
          f"{rep.mean_f:>9.4f}{rep.s_measure:>9.4f}")
    print(f"report: {out}\npr curve: {pr_path}")
    return EXIT_OK


def cmd_forward(args) -> int:
    try:
        image = load_image(args.image)
    except NetpbmError as exc:
        raise UsageError(str(exc)) from exc
    _, h, w = image.shape
    if h % 32 or w % 32:
        raise UsageError(f"image is {w}x{h}; width and height must be divisible by 32")
    net = build_network(ToyNetworkConfig(seed=args.seed, upsample_kind=args.upsample))
    save_map(network_forward(image, net), args.out)
    print(f"seed={args.seed} upsample={args.upsample} backend={backend_name()} -> {args.out}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_all(seed=args.seed, fault=args.inject_fault)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.name:<9} instances={r.instances} max_error={r.max_error:.3g}"
        if not r.passed:
            line += f" seed={r.failing_seed}"
        print(line)
    print(f"backend={backend_name()} seed={args.seed}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_PARTIAL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", default="1", help="worker threads, integer or 'auto'")

    parser = argparse.ArgumentParser(prog="nemsod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nem", parents=[common], help="write near-edge masks for a directory of ground truths")
    p.add_argument("gt_dir")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_nem)

    p = sub.add_parser("loss", parents=[common], help="per-image NEWLoss and plain BCE as CSV")
    p.add_argument("pred_dir")
    p.add_argument("gt_dir")
    p.add_argument("--eta", type=float, default=1.0)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("eval", parents=[common], help="MAE, max/mean F, S-measure and PR curve")
    p.add_argument("pred_dir")
    p.add_argument("gt_dir")
    p.add_argument("--out", default="report.json")
    p.add_argument("--pr-csv", default=None, help="default: <out stem>_pr.csv next to the report")
    p.add_argument("--name", default=None, help="dataset name in the report")
    p.add_argument("--beta2", type=float, default=DEFAULT_BETA2)
    p.add_argument("--eta", type=float, default=1.0, help="echoed in the report config")
    p.add_argument("--mu-f-mode", choices=MU_F_MODES, default="sweep")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("forward", parents=[common], help="run the toy network on a P6 image")
    p.add_argument("image")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="saliency.pgm")
    p.add_argument("--upsample", choices=("bilinear", "nearest"), default="bilinear")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("selftest", parents=[common], help="run the embedded oracle suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", choices=("edt",), default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except NetpbmError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
